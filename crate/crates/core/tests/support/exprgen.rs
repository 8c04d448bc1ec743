//! Random formula trees with an independent plain-`f64` evaluator.
//!
//! Trees are rendered to text (minimal parentheses, random redundant ones and
//! random spacing) and evaluated directly here; the library has to agree
//! after parsing the text.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub enum Node {
    Lit(f64, String),
    N,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    PowCall(Box<Node>, Box<Node>),
    Log(Box<Node>),
    Exp(Box<Node>),
    Sin(Box<Node>),
    Cos(Box<Node>),
    Abs(Box<Node>),
    Sqrt(Box<Node>),
    FactN,
    DfactN,
}

fn literal(rng: &mut ChaCha8Rng) -> Node {
    match rng.gen_range(0..4) {
        0 => {
            let m: u32 = rng.gen_range(1..=16);
            Node::Lit(m as f64, m.to_string())
        }
        1 => {
            let m: u32 = rng.gen_range(1..=40);
            let v = m as f64 / 8.0;
            Node::Lit(v, format!("{v}"))
        }
        2 => {
            let m: u32 = rng.gen_range(1..=9);
            let text = format!("{m}.5e-1");
            Node::Lit(text.parse().unwrap(), text)
        }
        _ => {
            let m: u32 = rng.gen_range(1..=99);
            let text = format!("0.{m:02}");
            Node::Lit(text.parse().unwrap(), text)
        }
    }
}

pub fn gen(rng: &mut ChaCha8Rng, depth: u32) -> Node {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..10) {
            0..=4 => literal(rng),
            5..=7 => Node::N,
            8 => Node::FactN,
            _ => Node::DfactN,
        };
    }
    let d = depth - 1;
    let b = |rng: &mut ChaCha8Rng| Box::new(gen(rng, d));
    match rng.gen_range(0..15) {
        0 => Node::Neg(b(rng)),
        1 | 2 => Node::Add(b(rng), b(rng)),
        3 => Node::Sub(b(rng), b(rng)),
        4 | 5 => Node::Mul(b(rng), b(rng)),
        6 | 7 => Node::Div(b(rng), b(rng)),
        8 => Node::Pow(b(rng), Box::new(literal(rng))),
        9 => Node::PowCall(b(rng), Box::new(literal(rng))),
        10 => Node::Log(b(rng)),
        11 => Node::Exp(Box::new(gen(rng, d.min(1)))),
        12 => Node::Sin(b(rng)),
        13 => Node::Cos(b(rng)),
        _ => {
            if rng.gen_bool(0.5) {
                Node::Abs(b(rng))
            } else {
                Node::Sqrt(b(rng))
            }
        }
    }
}

impl Node {
    fn prec(&self) -> u8 {
        match self {
            Node::Add(..) | Node::Sub(..) => 1,
            Node::Mul(..) | Node::Div(..) => 2,
            Node::Neg(_) => 3,
            Node::Pow(..) => 4,
            _ => 5,
        }
    }

    pub fn render(&self, rng: &mut ChaCha8Rng) -> String {
        let sp = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.3) { " " } else { "" };
        let child = |c: &Node, need: bool, rng: &mut ChaCha8Rng| {
            let inner = c.render(rng);
            if need || rng.gen_bool(0.1) {
                format!("({}{inner}{})", sp(rng), sp(rng))
            } else {
                inner
            }
        };
        let infix = |a: &Node, b: &Node, p: u8, op: &str, rng: &mut ChaCha8Rng| {
            let l = child(a, a.prec() < p, rng);
            let r = child(b, b.prec() <= p, rng);
            format!("{l}{}{op}{}{r}", sp(rng), sp(rng))
        };
        let call = |f: &str, a: &Node, rng: &mut ChaCha8Rng| {
            let inner = a.render(rng);
            format!("{f}({}{inner}{})", sp(rng), sp(rng))
        };
        match self {
            Node::Lit(_, t) => t.clone(),
            Node::N => "n".into(),
            Node::FactN => "fact(n)".into(),
            Node::DfactN => "dfact(n)".into(),
            Node::Neg(a) => format!("-{}", child(a, a.prec() < 3, rng)),
            Node::Add(a, b) => infix(a, b, 1, "+", rng),
            Node::Sub(a, b) => infix(a, b, 1, "-", rng),
            Node::Mul(a, b) => infix(a, b, 2, "*", rng),
            Node::Div(a, b) => infix(a, b, 2, "/", rng),
            Node::Pow(a, b) => {
                let l = child(a, a.prec() <= 4, rng);
                let r = child(b, b.prec() < 3, rng);
                format!("{l}{}^{}{r}", sp(rng), sp(rng))
            }
            Node::PowCall(a, b) => {
                let (x, y) = (a.render(rng), b.render(rng));
                format!("pow({x},{}{y})", sp(rng))
            }
            Node::Log(a) => call("log", a, rng),
            Node::Exp(a) => call("exp", a, rng),
            Node::Sin(a) => call("sin", a, rng),
            Node::Cos(a) => call("cos", a, rng),
            Node::Abs(a) => call("abs", a, rng),
            Node::Sqrt(a) => call("sqrt", a, rng),
        }
    }

    /// Value and a first-order rounding-error scale `E` (the result is
    /// accurate to about `ε·E`). `None` outside the real domain or when the
    /// value is too close to a domain boundary to be well conditioned.
    pub fn eval(&self, n: u64) -> Option<(f64, f64)> {
        let x = n as f64;
        let ok = |v: f64, e: f64| (v.is_finite() && e.is_finite() && v.abs() < 1e100).then_some((v, e));
        match self {
            Node::Lit(v, _) => Some((*v, v.abs())),
            Node::N => Some((x, x)),
            Node::FactN => {
                let v: f64 = (1..=n).map(|k| k as f64).product();
                ok(v, v * (8.0 + v.ln().abs()))
            }
            Node::DfactN => {
                let v: f64 = (1..=n).rev().step_by(2).map(|k| k as f64).product();
                ok(v, v * (8.0 + v.ln().abs()))
            }
            Node::Neg(a) => a.eval(n).map(|(v, e)| (-v, e)),
            Node::Add(a, b) | Node::Sub(a, b) => {
                let (u, eu) = a.eval(n)?;
                let (w, ew) = b.eval(n)?;
                let v = if matches!(self, Node::Add(..)) { u + w } else { u - w };
                ok(v, eu + ew + v.abs())
            }
            Node::Mul(a, b) => {
                let (u, eu) = a.eval(n)?;
                let (w, ew) = b.eval(n)?;
                ok(u * w, eu * w.abs() + u.abs() * ew + (u * w).abs())
            }
            Node::Div(a, b) => {
                let (u, eu) = a.eval(n)?;
                let (w, ew) = b.eval(n)?;
                if w.abs() < 1e-6 * ew {
                    return None;
                }
                let v = u / w;
                ok(v, eu / w.abs() + u.abs() * ew / (w * w) + v.abs())
            }
            Node::Pow(a, b) | Node::PowCall(a, b) => {
                let (u, eu) = a.eval(n)?;
                let (p, _) = b.eval(n)?;
                if u <= 0.0 || u < 1e-6 * eu {
                    return None;
                }
                let v = u.powf(p);
                ok(v, v * (p.abs() * eu / u + 1.0))
            }
            Node::Log(a) => {
                let (u, eu) = a.eval(n)?;
                if u <= 0.0 || u < 1e-6 * eu {
                    return None;
                }
                let v = u.ln();
                ok(v, eu / u + v.abs() + 1.0)
            }
            Node::Exp(a) => {
                let (u, eu) = a.eval(n)?;
                if u.abs() > 200.0 {
                    return None;
                }
                let v = u.exp();
                ok(v, v * (eu + 1.0))
            }
            Node::Sin(a) | Node::Cos(a) => {
                let (u, eu) = a.eval(n)?;
                let v = if matches!(self, Node::Sin(_)) { u.sin() } else { u.cos() };
                ok(v, eu + 1.0)
            }
            Node::Abs(a) => a.eval(n).map(|(v, e)| (v.abs(), e)),
            Node::Sqrt(a) => {
                let (u, eu) = a.eval(n)?;
                if u < 0.0 || (u > 0.0 && u < 1e-6 * eu) {
                    return None;
                }
                let v = u.sqrt();
                ok(v, if u > 0.0 { eu / (2.0 * v) + v } else { 0.0 })
            }
        }
    }
}
