use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    /// E: some maximal path.
    Exists,
    /// A: every maximal path.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Along edges.
    Forward,
    /// Against edges (the `I`-prefixed quantifiers).
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modality {
    Next,
    Eventually,
    Globally,
}

/// CTL formula tree over atoms of type `A`.
///
/// With `A = PropId` this is plain CTL; with filter atoms it is the
/// surface logic the user writes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula<A> {
    True,
    False,
    Atom(A),
    Not(Box<Formula<A>>),
    And(Box<Formula<A>>, Box<Formula<A>>),
    Or(Box<Formula<A>>, Box<Formula<A>>),
    Modal(Quantifier, Direction, Modality, Box<Formula<A>>),
    Until(Quantifier, Direction, Box<Formula<A>>, Box<Formula<A>>),
}

macro_rules! modal_ctor {
    ($($name:ident => $q:ident, $d:ident, $m:ident;)*) => {
        $(
            pub fn $name(f: Formula<A>) -> Self {
                Formula::Modal(Quantifier::$q, Direction::$d, Modality::$m, Box::new(f))
            }
        )*
    };
}

impl<A> Formula<A> {
    pub fn atom(a: A) -> Self {
        Formula::Atom(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula<A>) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula<A>, b: Formula<A>) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula<A>, b: Formula<A>) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    modal_ctor! {
        ex => Exists, Forward, Next;
        ax => All, Forward, Next;
        ef => Exists, Forward, Eventually;
        af => All, Forward, Eventually;
        eg => Exists, Forward, Globally;
        ag => All, Forward, Globally;
        iex => Exists, Inverse, Next;
        iax => All, Inverse, Next;
        ief => Exists, Inverse, Eventually;
        iaf => All, Inverse, Eventually;
        ieg => Exists, Inverse, Globally;
        iag => All, Inverse, Globally;
    }

    pub fn eu(a: Formula<A>, b: Formula<A>) -> Self {
        Formula::Until(Quantifier::Exists, Direction::Forward, Box::new(a), Box::new(b))
    }

    pub fn au(a: Formula<A>, b: Formula<A>) -> Self {
        Formula::Until(Quantifier::All, Direction::Forward, Box::new(a), Box::new(b))
    }

    pub fn ieu(a: Formula<A>, b: Formula<A>) -> Self {
        Formula::Until(Quantifier::Exists, Direction::Inverse, Box::new(a), Box::new(b))
    }

    pub fn iau(a: Formula<A>, b: Formula<A>) -> Self {
        Formula::Until(Quantifier::All, Direction::Inverse, Box::new(a), Box::new(b))
    }

    /// Formula length: the number of nodes in the tree, atoms counting 1.
    pub fn len(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Modal(_, _, _, f) => 1 + f.len(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(_, _, a, b) => 1 + a.len() + b.len(),
        }
    }

    /// Always false: a formula has at least one node.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Nesting depth; constants and atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 0,
            Formula::Not(f) | Formula::Modal(_, _, _, f) => 1 + f.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(_, _, a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Atoms in left-to-right order, repetitions included.
    pub fn atoms(&self) -> Vec<&A> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a A>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => out.push(a),
            Formula::Not(f) | Formula::Modal(_, _, _, f) => f.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(_, _, a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Structure-preserving substitution of every atom.
    pub fn try_map_atoms<B, E>(&self, f: &mut impl FnMut(&A) -> Result<B, E>) -> Result<Formula<B>, E> {
        Ok(match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => Formula::Atom(f(a)?),
            Formula::Not(x) => Formula::Not(Box::new(x.try_map_atoms(f)?)),
            Formula::And(a, b) => Formula::And(Box::new(a.try_map_atoms(f)?), Box::new(b.try_map_atoms(f)?)),
            Formula::Or(a, b) => Formula::Or(Box::new(a.try_map_atoms(f)?), Box::new(b.try_map_atoms(f)?)),
            Formula::Modal(q, d, m, x) => Formula::Modal(*q, *d, *m, Box::new(x.try_map_atoms(f)?)),
            Formula::Until(q, d, a, b) => {
                Formula::Until(*q, *d, Box::new(a.try_map_atoms(f)?), Box::new(b.try_map_atoms(f)?))
            }
        })
    }

    pub fn map_atoms<B>(&self, f: &mut impl FnMut(&A) -> B) -> Formula<B> {
        self.try_map_atoms(&mut |a| Ok::<B, std::convert::Infallible>(f(a)))
            .unwrap_or_else(|e| match e {})
    }

    /// Name of the top operator: `EX`, `IAU`, `&`, `atom`, ...
    pub fn operator(&self) -> String {
        match self {
            Formula::True => "true".into(),
            Formula::False => "false".into(),
            Formula::Atom(_) => "atom".into(),
            Formula::Not(_) => "!".into(),
            Formula::And(..) => "&".into(),
            Formula::Or(..) => "|".into(),
            Formula::Modal(q, d, m, _) => keyword(*q, *d, Some(*m)),
            Formula::Until(q, d, ..) => keyword(*q, *d, None),
        }
    }
}

/// Operator keyword, e.g. `EX`, `IAU`.
pub(crate) fn keyword(q: Quantifier, d: Direction, m: Option<Modality>) -> String {
    let mut s = String::new();
    if d == Direction::Inverse {
        s.push('I');
    }
    s.push(match q {
        Quantifier::Exists => 'E',
        Quantifier::All => 'A',
    });
    s.push(match m {
        Some(Modality::Next) => 'X',
        Some(Modality::Eventually) => 'F',
        Some(Modality::Globally) => 'G',
        None => 'U',
    });
    s
}

/// How an atom is written inside a formula.
pub trait AtomSyntax {
    fn write_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result;
}

impl AtomSyntax for super::PropId {
    fn write_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Fully parenthesized binary connectives; unary operators prefix.
impl<A: AtomSyntax> fmt::Display for Formula<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(a) => a.write_atom(f),
            Formula::Not(x) => write!(f, "!{x}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Modal(q, d, m, x) => write!(f, "{} {x}", keyword(*q, *d, Some(*m))),
            Formula::Until(q, d, a, b) => write!(f, "{}({a}, {b})", keyword(*q, *d, None)),
        }
    }
}
