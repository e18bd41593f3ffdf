//! Random well-typed programs for property tests.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Gen {
    rng: ChaCha8Rng,
    fresh: usize,
    nodes: usize,
    max_nodes: usize,
}

/// Linear numeric variables still available, and discrete ones.
#[derive(Clone)]
struct Scope {
    lin: Vec<String>,
    disc: Vec<String>,
}

impl Gen {
    fn name(&mut self, base: &str) -> String {
        self.fresh += 1;
        format!("{base}{}", self.fresh)
    }

    fn take(&mut self, s: &mut Scope) -> Option<String> {
        if s.lin.is_empty() {
            return None;
        }
        let i = self.rng.gen_range(0..s.lin.len());
        Some(s.lin.swap_remove(i))
    }

    /// An expression of type `num`, or `None` when the scope has run dry.
    fn num(&mut self, s: &mut Scope, depth: usize) -> Option<String> {
        self.nodes += 1;
        let leaf = depth == 0 || self.nodes >= self.max_nodes || s.lin.len() < 2;
        if leaf {
            return self.take(s);
        }
        // no bare leaves near the root, or most programs come out trivial
        let pick = self.rng.gen_range(0..if depth > 2 { 7 } else { 8 });
        match pick {
            0 | 1 => {
                let op = *["add", "sub", "mul"].choose(&mut self.rng).unwrap();
                let a = self.num(s, depth - 1)?;
                let b = self.num(s, depth - 1)?;
                Some(format!("{op} ({a}) ({b})"))
            }
            2 if !s.disc.is_empty() => {
                let z = s.disc.choose(&mut self.rng).unwrap().clone();
                let b = self.num(s, depth - 1)?;
                Some(format!("dmul {z} ({b})"))
            }
            3 => {
                let x = self.name("v");
                let e = self.num(s, depth - 1)?;
                s.lin.push(x.clone());
                let body = self.num(s, depth - 1)?;
                s.lin.retain(|y| *y != x);
                Some(format!("let {x} = {e} in\n{body}"))
            }
            4 => {
                let (a, b) = (self.name("p"), self.name("q"));
                let e1 = self.num(s, depth - 1)?;
                let e2 = self.num(s, depth - 1)?;
                s.lin.push(a.clone());
                s.lin.push(b.clone());
                let body = self.num(s, depth - 1)?;
                s.lin.retain(|y| *y != a && *y != b);
                Some(format!("let ({a}, {b}) = ({e1}, {e2}) in\n{body}"))
            }
            5 => {
                let d = self.name("d");
                let e = self.num(s, depth - 1)?;
                s.disc.push(d.clone());
                let body = self.num(s, depth - 1)?;
                s.disc.retain(|y| *y != d);
                Some(format!("dlet {d} = !({e}) in\n{body}"))
            }
            6 => {
                let a = self.num(s, depth - 1)?;
                let b = self.num(s, depth - 1)?;
                let (v, u) = (self.name("ok"), self.name("err"));
                // both branches draw on the same variables
                let mut left = s.clone();
                left.lin.push(v.clone());
                let l = self.num(&mut left, depth - 1)?;
                let mut right = s.clone();
                let r = self.take(&mut right)?;
                s.lin.retain(|x| left.lin.contains(x) && right.lin.contains(x));
                Some(format!(
                    "case div ({a}) ({b}) of\n  inl ({v}) => {l}\n| inr ({u}) => {r}"
                ))
            }
            _ => {
                let op = *["add", "sub", "mul", "dmul"].choose(&mut self.rng).unwrap();
                if op == "dmul" {
                    let z = s.disc.choose(&mut self.rng)?.clone();
                    let x = self.take(s)?;
                    return Some(format!("dmul {z} {x}"));
                }
                let a = self.take(s)?;
                let b = self.take(s)?;
                Some(format!("{op} {a} {b}"))
            }
        }
    }
}

/// A well-typed single-definition program with at most `max_nodes` syntax
/// nodes in the generator's count, deterministic in `seed`.
pub fn random_program(seed: u64, max_nodes: usize) -> String {
    for attempt in 0.. {
        let mut g = Gen {
            rng: ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(attempt)),
            fresh: 0,
            nodes: 0,
            max_nodes,
        };
        let nlin = g.rng.gen_range(4..16);
        let ndisc = g.rng.gen_range(0..3);
        let lin: Vec<String> = (0..nlin).map(|i| format!("x{i}")).collect();
        let disc: Vec<String> = (0..ndisc).map(|i| format!("z{i}")).collect();
        let mut scope = Scope {
            lin: lin.clone(),
            disc: disc.clone(),
        };
        let depth = g.rng.gen_range(4..10);
        if let Some(body) = g.num(&mut scope, depth) {
            let mut src = String::from("P");
            for x in &lin {
                src.push_str(&format!(" ({x}: num)"));
            }
            for z in &disc {
                src.push_str(&format!(" {{{z}: num}}"));
            }
            src.push_str(" :=\n");
            src.push_str(&body);
            src.push('\n');
            return src;
        }
    }
    unreachable!()
}
