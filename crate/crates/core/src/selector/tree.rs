use std::fmt;

use rand::Rng;

use super::features::FeatureVector;

/// Job characteristics available to a priority function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Terminal {
    /// Earliest start (release time).
    Es,
    /// Processing time.
    Pt,
    /// Weight.
    W,
    /// Due date.
    Dd,
    /// Total processing on the job's machine.
    Wl,
    /// Largest machine workload.
    MaxWl,
    /// Number of direct predecessors.
    NPrec,
    /// Number of direct successors.
    NSuc,
    /// Processing of direct predecessors.
    WlPrec,
    /// Processing of direct successors.
    WlSuc,
}

impl Terminal {
    pub const ALL: [Terminal; 10] = [
        Terminal::Es,
        Terminal::Pt,
        Terminal::W,
        Terminal::Dd,
        Terminal::Wl,
        Terminal::MaxWl,
        Terminal::NPrec,
        Terminal::NSuc,
        Terminal::WlPrec,
        Terminal::WlSuc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Terminal::Es => "ES",
            Terminal::Pt => "PT",
            Terminal::W => "W",
            Terminal::Dd => "DD",
            Terminal::Wl => "WL",
            Terminal::MaxWl => "maxWL",
            Terminal::NPrec => "NPREC",
            Terminal::NSuc => "NSUC",
            Terminal::WlPrec => "WLPREC",
            Terminal::WlSuc => "WLSUC",
        }
    }

    pub fn from_name(name: &str) -> Option<Terminal> {
        Terminal::ALL.into_iter().find(|t| t.name() == name)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Add,
    Sub,
    Mul,
    /// Protected division: 1 when the denominator is 0.
    Div,
    Max,
    Min,
}

impl Op {
    pub const ALL: [Op; 6] = [Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Max, Op::Min];

    pub fn symbol(self) -> &'static str {
        match self {
            Op::Add => "+",
            Op::Sub => "-",
            Op::Mul => "*",
            Op::Div => "%",
            Op::Max => "max",
            Op::Min => "min",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Op> {
        Op::ALL.into_iter().find(|o| o.symbol() == s)
    }

    /// Applies the operator, saturating at the finite f64 range.
    pub fn apply(self, a: f64, b: f64) -> f64 {
        let v = match self {
            Op::Add => a + b,
            Op::Sub => a - b,
            Op::Mul => a * b,
            Op::Div => {
                if b == 0.0 {
                    1.0
                } else {
                    a / b
                }
            }
            Op::Max => a.max(b),
            Op::Min => a.min(b),
        };
        v.clamp(f64::MIN, f64::MAX)
    }
}

/// Priority expression tree; every operator is binary.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Terminal(Terminal),
    Op(Op, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeMethod {
    Grow,
    Full,
}

impl Expr {
    pub fn op(op: Op, left: Expr, right: Expr) -> Expr {
        Expr::Op(op, Box::new(left), Box::new(right))
    }

    /// Depth of the deepest leaf; a lone terminal has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Expr::Terminal(_) => 0,
            Expr::Op(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::Terminal(_) => 1,
            Expr::Op(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn evaluate(&self, features: &FeatureVector) -> f64 {
        match self {
            Expr::Terminal(t) => features.get(*t),
            Expr::Op(op, l, r) => op.apply(l.evaluate(features), r.evaluate(features)),
        }
    }

    /// Subtree at pre-order position `index` and its depth in `self`.
    pub fn subtree(&self, index: usize) -> Option<(&Expr, usize)> {
        fn go<'a>(e: &'a Expr, index: &mut usize, depth: usize) -> Option<(&'a Expr, usize)> {
            if *index == 0 {
                return Some((e, depth));
            }
            *index -= 1;
            match e {
                Expr::Terminal(_) => None,
                Expr::Op(_, l, r) => go(l, index, depth + 1).or_else(|| go(r, index, depth + 1)),
            }
        }
        let mut i = index;
        go(self, &mut i, 0)
    }

    /// Copy of `self` with the pre-order position `index` replaced.
    pub fn replace(&self, index: usize, with: &Expr) -> Expr {
        fn go(e: &Expr, index: &mut usize, with: &Expr) -> Expr {
            if *index == 0 {
                *index = usize::MAX;
                return with.clone();
            }
            if *index != usize::MAX {
                *index -= 1;
            }
            match e {
                Expr::Terminal(t) => Expr::Terminal(*t),
                Expr::Op(op, l, r) => {
                    let l = go(l, index, with);
                    let r = go(r, index, with);
                    Expr::op(*op, l, r)
                }
            }
        }
        let mut i = index;
        go(self, &mut i, with)
    }

    /// Random tree built by GROW or FULL.
    ///
    /// FULL puts operators at every depth below `max_depth`; GROW flips a
    /// fair coin between terminal and operator at each node. Both place
    /// terminals at `max_depth`.
    pub fn random<R: Rng + ?Sized>(max_depth: usize, method: TreeMethod, rng: &mut R) -> Expr {
        let leaf = max_depth == 0
            || match method {
                TreeMethod::Full => false,
                TreeMethod::Grow => rng.gen_bool(0.5),
            };
        if leaf {
            Expr::Terminal(Terminal::ALL[rng.gen_range(0..Terminal::ALL.len())])
        } else {
            let op = Op::ALL[rng.gen_range(0..Op::ALL.len())];
            let l = Expr::random(max_depth - 1, method, rng);
            let r = Expr::random(max_depth - 1, method, rng);
            Expr::op(op, l, r)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Terminal(t) => f.write_str(t.name()),
            Expr::Op(op, l, r) => write!(f, "({} {} {})", op.symbol(), l, r),
        }
    }
}
