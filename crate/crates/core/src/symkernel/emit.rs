use num_traits::{One, Signed, Zero};

use super::expr::{Expr, Node};
use super::poly::{Exponent, Q};

/// Deterministic text of the normalized expression.
pub fn emit(e: &Expr) -> String {
    match e.normalize() {
        Ok(n) => print(&n),
        Err(_) => print(e),
    }
}

/// Prints the tree as it stands, without normalizing.
pub fn print(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(e, &mut s);
    s
}

fn write_expr(e: &Expr, s: &mut String) {
    match e.node() {
        Node::Sum(ts) => {
            for (i, t) in ts.iter().enumerate() {
                let neg = t.is_negative_term();
                let body = if neg { t.neg() } else { t.clone() };
                match (i, neg) {
                    (0, true) => s.push('-'),
                    (0, false) => {}
                    (_, true) => s.push_str(" - "),
                    (_, false) => s.push_str(" + "),
                }
                write_term(&body, s, neg);
            }
        }
        _ => {
            if e.is_negative_term() {
                s.push('-');
                write_term(&e.neg(), s, true);
            } else {
                write_term(e, s, false);
            }
        }
    }
}

/// A non-negative term; `after_minus` forces parentheses around sums.
fn write_term(e: &Expr, s: &mut String, after_minus: bool) {
    match e.node() {
        Node::Const(c) => write_const(c, s),
        Node::Atom(a) => s.push_str(&a.to_string()),
        Node::Sum(_) => {
            if after_minus {
                s.push('(');
                write_expr(e, s);
                s.push(')');
            } else {
                write_expr(e, s);
            }
        }
        Node::Product(fs) => write_product(fs, s),
        Node::Power(..) => write_product(std::slice::from_ref(e), s),
    }
}

fn write_const(c: &Q, s: &mut String) {
    if c.is_integer() {
        s.push_str(&c.numer().to_string());
    } else {
        s.push_str(&format!("{}/{}", c.numer(), c.denom()));
    }
}

fn write_product(fs: &[Expr], s: &mut String) {
    let mut coeff = Q::one();
    let mut num: Vec<(Expr, Exponent)> = Vec::new();
    let mut den: Vec<(Expr, Exponent)> = Vec::new();
    for f in fs {
        match f.node() {
            Node::Const(c) => coeff *= c,
            Node::Power(b, e) if *e < Exponent::zero() => den.push((b.clone(), -*e)),
            Node::Power(b, e) => num.push((b.clone(), *e)),
            _ => num.push((f.clone(), Exponent::one())),
        }
    }
    let mut parts: Vec<String> = Vec::new();
    let p = Q::from_integer(coeff.numer().abs());
    if !p.is_one() || num.is_empty() {
        parts.push(p.numer().to_string());
    }
    for (b, e) in &num {
        parts.push(power_text(b, *e, num.len() + parts.len() > 1 || !den.is_empty()));
    }
    s.push_str(&parts.join("*"));
    let mut dparts: Vec<String> = Vec::new();
    let q = Q::from_integer(coeff.denom().clone());
    if !q.is_one() {
        dparts.push(q.numer().to_string());
    }
    for (b, e) in &den {
        dparts.push(power_text(b, *e, true));
    }
    match dparts.len() {
        0 => {}
        1 => {
            s.push('/');
            s.push_str(&dparts[0]);
        }
        _ => {
            s.push_str("/(");
            s.push_str(&dparts.join("*"));
            s.push(')');
        }
    }
}

fn power_text(b: &Expr, e: Exponent, in_product: bool) -> String {
    let base = match b.node() {
        Node::Atom(a) => a.to_string(),
        Node::Const(c) if c.is_integer() && !c.is_negative() => c.numer().to_string(),
        Node::Sum(_) if e.is_one() && !in_product => print(b),
        _ => format!("({})", print(b)),
    };
    if e.is_one() {
        base
    } else if e.is_integer() {
        format!("{base}^{}", e.numer())
    } else {
        format!("{base}^({}/{})", e.numer(), e.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::super::bk;
    use super::*;

    #[test]
    fn emits_samples() {
        assert_eq!(emit(&bk("alpha + alpha")), "2*alpha");
        assert_eq!(emit(&bk("u[x,x]")), "u[x,x]");
        assert_eq!(emit(&bk("t^(1/3)")), "t^(1/3)");
        assert_eq!(emit(&bk("3/6")), "1/2");
        assert_eq!(emit(&bk("x - y/t")), "-y/t + x");
    }
}
