use super::poly::{divides, lcm, reduce_with_budget, s_polynomial, Budget, Field, Monomial, MultiPoly};
use super::{GroebnerError, DEFAULT_MAX_PAIRS, DEFAULT_MAX_TERM_OPS};

/// A reduced Gröbner basis plus the work spent computing it.
#[derive(Debug, Clone)]
pub struct GroebnerBasis<F: Field> {
    pub basis: Vec<MultiPoly<F>>,
    pub pairs_processed: u64,
    pub term_ops: u64,
}

impl<F: Field> GroebnerBasis<F> {
    pub fn reduce(&self, f: &MultiPoly<F>) -> Result<MultiPoly<F>, GroebnerError> {
        super::poly::reduce(f, &self.basis)
    }

    pub fn contains(&self, f: &MultiPoly<F>) -> Result<bool, GroebnerError> {
        Ok(self.reduce(f)?.is_zero())
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }
}

pub fn buchberger<F: Field>(generators: &[MultiPoly<F>]) -> Result<GroebnerBasis<F>, GroebnerError> {
    buchberger_with_budget(generators, Budget::new(DEFAULT_MAX_PAIRS, DEFAULT_MAX_TERM_OPS))
}

/// Buchberger with the normal selection strategy and both of Buchberger's
/// criteria. The order is the one carried by the generators' ring.
pub fn buchberger_with_budget<F: Field>(
    generators: &[MultiPoly<F>],
    mut budget: Budget,
) -> Result<GroebnerBasis<F>, GroebnerError> {
    let Some(first) = generators.first() else {
        return Ok(GroebnerBasis {
            basis: Vec::new(),
            pairs_processed: 0,
            term_ops: 0,
        });
    };
    let ring = first.ring().clone();
    let order = ring.order();

    // `g` keeps every element ever added so pair indices stay valid;
    // `active` marks those whose leading monomial is not made redundant.
    let mut g: Vec<MultiPoly<F>> = Vec::new();
    let mut active: Vec<bool> = Vec::new();
    let mut pending: Vec<Pair> = Vec::new();
    for f in generators {
        if f.ring() != &ring && **f.ring() != *ring {
            return Err(GroebnerError::RingMismatch);
        }
        let r = reduce_with_budget(f, &active_set(&g, &active), &mut budget)?;
        if !r.is_zero() {
            update(&mut g, &mut active, &mut pending, r.monic());
        }
    }

    while !pending.is_empty() {
        // normal strategy: smallest lcm, ties broken by index
        let best = (0..pending.len())
            .min_by(|&a, &b| {
                let (pa, pb) = (&pending[a], &pending[b]);
                order.cmp(&pa.lcm, &pb.lcm).then((pa.i, pa.j).cmp(&(pb.i, pb.j)))
            })
            .expect("nonempty");
        let pair = pending.swap_remove(best);
        budget.spend_pair()?;

        let s = s_polynomial(&g[pair.i], &g[pair.j])?;
        let r = reduce_with_budget(&s, &active_set(&g, &active), &mut budget)?;
        if !r.is_zero() {
            update(&mut g, &mut active, &mut pending, r.monic());
        }
    }

    let g = active_set(&g, &active);
    let basis = reduced(g, &mut budget)?;
    let out = GroebnerBasis {
        basis,
        pairs_processed: budget.pairs,
        term_ops: budget.term_ops,
    };

    if !is_groebner_basis(&out.basis)? {
        return Err(GroebnerError::PostCheckFailed {
            what: "an S-polynomial of the output does not reduce to zero".into(),
        });
    }
    for f in generators {
        if !out.contains(f)? {
            return Err(GroebnerError::PostCheckFailed {
                what: "a generator does not reduce to zero".into(),
            });
        }
    }
    Ok(out)
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

fn active_set<F: Field>(g: &[MultiPoly<F>], active: &[bool]) -> Vec<MultiPoly<F>> {
    g.iter().zip(active).filter(|(_, &a)| a).map(|(p, _)| p.clone()).collect()
}

fn disjoint(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x == 0 || y == 0)
}

/// Gebauer–Möller update: adds `h`, prunes pairs by the product and chain
/// criteria, and deactivates elements whose leading monomial `lm(h)` divides.
fn update<F: Field>(g: &mut Vec<MultiPoly<F>>, active: &mut Vec<bool>, pending: &mut Vec<Pair>, h: MultiPoly<F>) {
    let hn = g.len();
    let lh: Monomial = h.leading_monomial().expect("nonzero").into();
    let lm = |k: usize| g[k].leading_monomial().expect("nonzero");

    let mut c: Vec<Pair> = (0..hn)
        .filter(|&k| active[k])
        .map(|k| Pair {
            i: k,
            j: hn,
            lcm: lcm(lm(k), &lh),
        })
        .collect();
    let mut d: Vec<Pair> = Vec::new();
    while let Some(p) = c.pop() {
        let keep = disjoint(lm(p.i), &lh)
            || (!c.iter().any(|q| divides(&q.lcm, &p.lcm)) && !d.iter().any(|q| divides(&q.lcm, &p.lcm)));
        if keep {
            d.push(p);
        }
    }
    d.retain(|p| !disjoint(lm(p.i), &lh));

    pending.retain(|p| {
        !divides(&lh, &p.lcm) || lcm(lm(p.i), &lh) == p.lcm || lcm(lm(p.j), &lh) == p.lcm
    });
    pending.extend(d);

    for k in 0..hn {
        if active[k] && divides(&lh, lm(k)) {
            active[k] = false;
        }
    }
    g.push(h);
    active.push(true);
}

/// Minimal, monic, interreduced; sorted by leading monomial ascending.
fn reduced<F: Field>(g: Vec<MultiPoly<F>>, budget: &mut Budget) -> Result<Vec<MultiPoly<F>>, GroebnerError> {
    let mut minimal: Vec<MultiPoly<F>> = Vec::new();
    for (k, p) in g.iter().enumerate() {
        let lm = p.leading_monomial().unwrap();
        let redundant = g.iter().enumerate().any(|(m, q)| {
            let lq = q.leading_monomial().unwrap();
            m != k && divides(lq, lm) && (lq != lm || m < k)
        });
        if !redundant {
            minimal.push(p.clone());
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<MultiPoly<F>> = minimal
            .iter()
            .enumerate()
            .filter(|&(m, _)| m != k)
            .map(|(_, q)| q.clone())
            .collect();
        out.push(reduce_with_budget(&minimal[k], &others, budget)?.monic());
    }
    let order = out.first().map(|p| p.ring().order());
    if let Some(order) = order {
        out.sort_by(|a, b| order.cmp(a.leading_monomial().unwrap(), b.leading_monomial().unwrap()));
    }
    Ok(out)
}

/// Every S-polynomial reduces to zero.
pub fn is_groebner_basis<F: Field>(basis: &[MultiPoly<F>]) -> Result<bool, GroebnerError> {
    for j in 0..basis.len() {
        for i in 0..j {
            let s = s_polynomial(&basis[i], &basis[j])?;
            if !super::poly::reduce(&s, basis)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;
    use crate::groebner::poly::{integer, MonomialOrder, Ring};

    type P = MultiPoly<BigRational>;

    #[test]
    fn collapses_to_linear() {
        // {x² − 1, x − 1} → {x − 1}
        let r = Ring::new(["x"], MonomialOrder::Lex);
        let x = P::var(&r, 0);
        let one = P::one(&r);
        let gb = buchberger(&[x.pow(2).sub(&one).unwrap(), x.sub(&one).unwrap()]).unwrap();
        assert_eq!(gb.basis, vec![x.sub(&one).unwrap()]);
    }

    #[test]
    fn already_groebner_is_kept() {
        let r = Ring::new(["x", "y"], MonomialOrder::Lex);
        let x = P::var(&r, 0);
        let y = P::var(&r, 1);
        let gens = vec![y.pow(2).sub(&P::one(&r)).unwrap(), x.sub(&y).unwrap()];
        let gb = buchberger(&gens).unwrap();
        assert_eq!(gb.basis, gens);
    }

    #[test]
    fn twisted_cubic_lex() {
        // Leading terms y and z are coprime, so the generators are already a
        // basis; yx − z = x(y − x²) − (z − x³) is a member.
        let r = Ring::new(["y", "z", "x"], MonomialOrder::Lex);
        let (y, z, x) = (P::var(&r, 0), P::var(&r, 1), P::var(&r, 2));
        let gb = buchberger(&[y.sub(&x.pow(2)).unwrap(), z.sub(&x.pow(3)).unwrap()]).unwrap();
        assert_eq!(gb.len(), 2);
        assert!(gb.contains(&y.mul(&x).unwrap().sub(&z).unwrap()).unwrap());
        assert!(!gb.contains(&y.sub(&z).unwrap()).unwrap());
    }

    #[test]
    fn circle_and_line_grevlex() {
        let r = Ring::new(["x", "y"], MonomialOrder::GrevLex);
        let (x, y) = (P::var(&r, 0), P::var(&r, 1));
        let one = P::one(&r);
        let circle = x.pow(2).add(&y.pow(2)).unwrap().sub(&one).unwrap();
        let line = x.sub(&y).unwrap();
        let gb = buchberger(&[circle, line]).unwrap();
        // x = y, 2y² = 1
        let two_y2 = y.pow(2).scale(&integer(2)).sub(&one).unwrap();
        assert!(gb.contains(&two_y2).unwrap());
        assert!(is_groebner_basis(&gb.basis).unwrap());
    }

    #[test]
    fn unit_ideal() {
        let r = Ring::new(["x", "y"], MonomialOrder::Lex);
        let (x, y) = (P::var(&r, 0), P::var(&r, 1));
        let one = P::one(&r);
        let gb = buchberger(&[x.mul(&y).unwrap().sub(&one).unwrap(), x.clone()]).unwrap();
        assert_eq!(gb.basis, vec![one]);
    }

    #[test]
    fn budget_is_enforced() {
        let r = Ring::new(["x", "y", "z"], MonomialOrder::Lex);
        let (x, y, z) = (P::var(&r, 0), P::var(&r, 1), P::var(&r, 2));
        let gens = [
            x.pow(3).sub(&y.mul(&z).unwrap()).unwrap(),
            y.pow(3).sub(&x.mul(&z).unwrap()).unwrap(),
            z.pow(3).sub(&x.mul(&y).unwrap()).unwrap(),
        ];
        let err = buchberger_with_budget(&gens, Budget::new(1, 10)).unwrap_err();
        assert!(matches!(err, GroebnerError::ResourceExceeded { .. }));
    }

    #[test]
    fn empty_and_zero_generators() {
        let r = Ring::new(["x"], MonomialOrder::Lex);
        assert!(buchberger::<BigRational>(&[]).unwrap().is_empty());
        assert!(buchberger(&[P::zero(&r)]).unwrap().is_empty());
    }
}
