//! The 2×2 Lax ansatz for `ẋ = Γ̃Px` with `Γ̃ = [[0, 1], [−1, 0]]` and
//! `P = [[p1, p2], [p3, p4]]`.
//!
//! `L` has columns `[[a1, a2], [a3, a4]]x` and `[[y1, y2], [y3, y4]]x`, and
//! `B = [[b1, b2], [b3, b4]]` is constant. Comparing the `x1` and `x2`
//! coefficients of `L̇` and `[B, L]` entry by entry gives eight polynomial
//! equations in the twelve unknowns.

use std::sync::Arc;

use num_complex::{Complex, Complex64};
use num_traits::{One, ToPrimitive, Zero};

use super::buchberger::buchberger_with_budget;
use super::poly::{integer, Budget, Field, MonomialOrder, MultiPoly, Ring};
use super::{GaussianRational, GroebnerError, Rational, DEFAULT_MAX_PAIRS, DEFAULT_MAX_TERM_OPS};

/// Unknowns in lex order, largest first.
pub const ANSATZ_VARIABLES: [&str; 12] = ["b1", "b2", "b3", "b4", "a1", "a2", "a3", "a4", "y1", "y2", "y3", "y4"];

const B: usize = 0;
const A: usize = 4;
const Y: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum PValues {
    Numeric([Rational; 4]),
    /// `p1..p4` become ring variables placed after the unknowns.
    Symbolic,
}

#[derive(Debug, Clone)]
pub struct AnsatzSystem {
    pub ring: Arc<Ring>,
    /// Entries (1,1), (1,2), (2,1), (2,2); `x1` then `x2` coefficient.
    pub equations: Vec<MultiPoly<Rational>>,
    pub symmetric: bool,
    pub p: PValues,
}

impl AnsatzSystem {
    /// Residuals at complex values of the twelve unknowns, for numeric `p`.
    /// Used to check floating-point constructions against the exact system.
    pub fn eval_complex(&self, point: &[Complex64; 12]) -> Vec<Complex64> {
        self.equations
            .iter()
            .map(|eq| {
                eq.terms()
                    .map(|(m, c)| {
                        let mut t = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
                        for (v, &e) in point.iter().zip(m) {
                            t *= v.powu(u32::from(e));
                        }
                        t
                    })
                    .sum()
            })
            .collect()
    }
}

/// The eight equations for the given `p` polynomials (constants or ring
/// variables), in a ring whose first twelve variables are the unknowns.
fn ansatz_equations<F: Field>(ring: &Arc<Ring>, p: &[MultiPoly<F>; 4]) -> Vec<MultiPoly<F>> {
    let v = |i: usize| MultiPoly::<F>::var(ring, i);
    let b = [[v(B), v(B + 1)], [v(B + 2), v(B + 3)]];
    // covector (coefficients of x1, x2) of each entry of L
    let c = [[[v(A), v(A + 1)], [v(Y), v(Y + 1)]], [[v(A + 2), v(A + 3)], [v(Y + 2), v(Y + 3)]]];
    let [p1, p2, p3, p4] = p;
    let mut out = Vec::with_capacity(8);
    for i in 0..2 {
        for j in 0..2 {
            let [c1, c2] = &c[i][j];
            // d/dt (c·x) = (G̃ᵀc)·x with G̃ = Γ̃P = [[p3, p4], [−p1, −p2]]
            let lhs = [
                p3.mul(c1).unwrap().sub(&p1.mul(c2).unwrap()).unwrap(),
                p4.mul(c1).unwrap().sub(&p2.mul(c2).unwrap()).unwrap(),
            ];
            for (k, l) in lhs.into_iter().enumerate() {
                let mut e = l;
                for m in 0..2 {
                    e = e.sub(&b[i][m].mul(&c[m][j][k]).unwrap()).unwrap();
                    e = e.add(&c[i][m][k].mul(&b[m][j]).unwrap()).unwrap();
                }
                out.push(e);
            }
        }
    }
    out
}

pub fn build_ansatz_system(p: &PValues, symmetric: bool) -> Result<AnsatzSystem, GroebnerError> {
    match p {
        PValues::Numeric(vals) => {
            if symmetric && vals[2] != vals[1] {
                return Err(GroebnerError::NotSymmetricP);
            }
            let ring = Ring::new(ANSATZ_VARIABLES, MonomialOrder::Lex);
            let pp = vals.clone().map(|x| MultiPoly::constant(&ring, x));
            Ok(AnsatzSystem {
                equations: ansatz_equations(&ring, &pp),
                ring,
                symmetric,
                p: p.clone(),
            })
        }
        PValues::Symbolic => {
            let names = ANSATZ_VARIABLES.iter().copied().chain(["p1", "p2", "p3", "p4"]);
            let ring = Ring::new(names, MonomialOrder::Lex);
            let v = |i| MultiPoly::var(&ring, i);
            let p3 = if symmetric { v(13) } else { v(14) };
            let pp = [v(12), v(13), p3, v(15)];
            Ok(AnsatzSystem {
                equations: ansatz_equations(&ring, &pp),
                ring,
                symmetric,
                p: PValues::Symbolic,
            })
        }
    }
}

/// The degree-2 polynomial in `y3, y4` reported as the first element of the
/// ansatz ideal's lex basis, with coefficients built from `p`.
fn displayed_element<F: Field>(p: &[MultiPoly<F>; 4], y3: &MultiPoly<F>, y4: &MultiPoly<F>) -> MultiPoly<F> {
    let [p1, p2, p3, p4] = p;
    let m = |fs: &[&MultiPoly<F>]| fs.iter().skip(1).fold(fs[0].clone(), |acc, f| acc.mul(f).unwrap());
    let plus = [
        m(&[p1, p1, p2, p4, y4, y4]),
        m(&[p1, p2, p3, p3, y4, y4]),
        m(&[p1, p2, p4, p4, y3, y3]),
        m(&[p1, p3, p3, p4, y3, y4]),
        m(&[p2, p2, p2, p3, y3, y4]),
        m(&[p2, p3, p3, p4, y3, y3]),
    ];
    let minus = [
        m(&[p1, p1, p3, p4, y4, y4]),
        m(&[p1, p2, p2, p3, y4, y4]),
        m(&[p1, p2, p2, p4, y3, y4]),
        m(&[p1, p3, p4, p4, y3, y3]),
        m(&[p2, p2, p3, p4, y3, y3]),
        m(&[p2, p3, p3, p3, y3, y4]),
    ];
    let zero = MultiPoly::zero(y3.ring());
    let s = plus.iter().fold(zero.clone(), |a, t| a.add(t).unwrap());
    minus.iter().fold(s, |a, t| a.sub(t).unwrap())
}

/// The displayed element in the numeric ansatz ring.
pub fn displayed_basis_element(p: &[Rational; 4]) -> MultiPoly<Rational> {
    let ring = Ring::new(ANSATZ_VARIABLES, MonomialOrder::Lex);
    let pp = p.clone().map(|x| MultiPoly::constant(&ring, x));
    displayed_element(&pp, &MultiPoly::var(&ring, Y + 2), &MultiPoly::var(&ring, Y + 3))
}

#[derive(Debug, Clone)]
pub struct MembershipReport {
    pub holds: bool,
    pub element: MultiPoly<Rational>,
    pub remainder: MultiPoly<Rational>,
    pub basis_len: usize,
    pub pairs_processed: u64,
    pub term_ops: u64,
}

/// Computes the lex basis of the ansatz ideal for numeric `p` and reduces the
/// displayed element modulo it.
pub fn basis_element_membership(p: &[Rational; 4]) -> Result<MembershipReport, GroebnerError> {
    membership_with_budget(p, Budget::new(DEFAULT_MAX_PAIRS, DEFAULT_MAX_TERM_OPS))
}

fn membership_with_budget(p: &[Rational; 4], budget: Budget) -> Result<MembershipReport, GroebnerError> {
    let sys = build_ansatz_system(&PValues::Numeric(p.clone()), false)?;
    let gb = buchberger_with_budget(&sys.equations, budget)?;
    let element = displayed_basis_element(p).with_ring(&sys.ring)?;
    let remainder = gb.reduce(&element)?;
    Ok(MembershipReport {
        holds: remainder.is_zero(),
        element,
        remainder,
        basis_len: gb.len(),
        pairs_processed: gb.pairs_processed,
        term_ops: gb.term_ops,
    })
}

/// Closed-form solution of the symmetric ansatz in the free variables
/// `b4, y1..y4`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralSolution {
    pub a: [Rational; 4],
    pub b: [Rational; 4],
    pub y: [Rational; 4],
}

impl GeneralSolution {
    pub fn new(p1: &Rational, p2: &Rational, p4: &Rational, b4: &Rational, y: &[Rational; 4]) -> Result<Self, GroebnerError> {
        let [y1, y2, y3, y4] = y;
        let two = integer(2);
        let d1 = y2 * (p1 * y2 - &two * p2 * y1) + p4 * y1 * y1;
        let d2 = y2 * y3 - y1 * y4;
        if d1.is_zero() {
            return Err(GroebnerError::DenominatorZero {
                which: "y2(p1 y2 - 2 p2 y1) + p4 y1^2",
            });
        }
        if d2.is_zero() {
            return Err(GroebnerError::DenominatorZero { which: "y2 y3 - y1 y4" });
        }
        let a1 = -y3.clone();
        let a2 = -y4.clone();
        let a3 = (p1 * y4 * (y1 * y4 - &two * y2 * y3) + &two * p2 * y2 * y3 * y3 - p4 * y1 * y3 * y3) / &d1;
        let a4 = (y4 * y4 * (&two * p2 * y1 - p1 * y2) + p4 * y3 * (y2 * y3 - &two * y1 * y4)) / &d1;
        let b2 = -(p1 * y2 * y2 - &two * p2 * y1 * y2 + p4 * y1 * y1) / (&two * &d2);
        let b3 = (p1 * y4 * y4 - &two * p2 * y3 * y4 + p4 * y3 * y3) / (&two * &d2);
        let b1 = (-(b4 * y1 * y4) + b4 * y2 * y3 + p1 * y2 * y4 - p2 * y1 * y4 - p2 * y2 * y3 + p4 * y1 * y3) / &d2;
        Ok(Self {
            a: [a1, a2, a3, a4],
            b: [b1, b2, b3, b4.clone()],
            y: y.clone(),
        })
    }

    /// Values of the twelve unknowns in [`ANSATZ_VARIABLES`] order.
    pub fn point(&self) -> Vec<Rational> {
        self.b.iter().chain(&self.a).chain(&self.y).cloned().collect()
    }
}

#[derive(Debug, Clone)]
pub struct GeneralSolutionReport {
    pub solution: GeneralSolution,
    /// Value of each ansatz equation at the solution.
    pub residuals: Vec<Rational>,
    /// `L21` from the closed forms equals the displayed `q`.
    pub q_matches: bool,
    /// `Tr L² − 4 D2² H / D1` as a polynomial in `x1, x2`.
    pub trace_defect: MultiPoly<Rational>,
}

impl GeneralSolutionReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(Zero::is_zero) && self.q_matches && self.trace_defect.is_zero()
    }
}

pub fn verify_general_solution(
    p1: &Rational,
    p2: &Rational,
    p4: &Rational,
    b4: &Rational,
    y: &[Rational; 4],
) -> Result<GeneralSolutionReport, GroebnerError> {
    let sol = GeneralSolution::new(p1, p2, p4, b4, y)?;
    let sys = build_ansatz_system(&PValues::Numeric([p1.clone(), p2.clone(), p2.clone(), p4.clone()]), true)?;
    let point = sol.point();
    let residuals = sys.equations.iter().map(|e| e.eval(&point)).collect();

    let xr = Ring::new(["x1", "x2"], MonomialOrder::Lex);
    let x1 = MultiPoly::var(&xr, 0);
    let x2 = MultiPoly::var(&xr, 1);
    let lin = |c1: &Rational, c2: &Rational| x1.scale(c1).add(&x2.scale(c2)).unwrap();
    let [a1, a2, a3, a4] = &sol.a;
    let [y1, y2, y3, y4] = y;
    let l11 = lin(a1, a2);
    let l21 = lin(a3, a4);
    let l12 = lin(y1, y2);
    let l22 = lin(y3, y4);

    let two = integer(2);
    let d1 = y2 * (p1 * y2 - &two * p2 * y1) + p4 * y1 * y1;
    let d2 = y2 * y3 - y1 * y4;
    // q exactly as displayed, with its own grouping of the denominator
    let qd = p4 * y1 * y1 + y2 * (p1 * y2 - &two * p2 * y1);
    let q1 = (-(p4 * y1 * y3 * y3) + &two * p2 * y2 * y3 * y3 + p1 * y4 * (y1 * y4 - &two * y2 * y3)) / &qd;
    let q2 = ((&two * p2 * y1 - p1 * y2) * y4 * y4 + p4 * y3 * (y2 * y3 - &two * y1 * y4)) / &qd;
    let q_matches = l21 == lin(&q1, &q2) && l11 == lin(&-y3.clone(), &-y4.clone());

    let tr = l11
        .pow(2)
        .add(&l12.mul(&l21).unwrap().scale(&two))
        .unwrap()
        .add(&l22.pow(2))
        .unwrap();
    let half = Rational::new(1.into(), 2.into());
    let h = x1
        .pow(2)
        .scale(p1)
        .add(&x1.mul(&x2).unwrap().scale(&(&two * p2)))
        .unwrap()
        .add(&x2.pow(2).scale(p4))
        .unwrap()
        .scale(&half);
    let factor = integer(4) * &d2 * &d2 / &d1;
    let trace_defect = tr.sub(&h.scale(&factor)).unwrap();

    Ok(GeneralSolutionReport {
        solution: sol,
        residuals,
        q_matches,
        trace_defect,
    })
}

#[derive(Debug, Clone)]
pub struct DenominatorIdentities {
    /// `y2(p1y2 − 2p2y1) + p4y1² − (y1,y2)Γ̃ᵀPΓ̃(y1,y2)ᵀ`
    pub first_defect: MultiPoly<Rational>,
    /// `y2y3 − y1y4 − (y1,y2)Γ̃ᵀ(y3,y4)ᵀ`
    pub second_defect: MultiPoly<Rational>,
}

impl DenominatorIdentities {
    pub fn hold(&self) -> bool {
        self.first_defect.is_zero() && self.second_defect.is_zero()
    }
}

/// Both denominator identities as polynomial identities in
/// `p1, p2, p4, y1..y4` with `P` symmetric.
pub fn denominator_identities() -> DenominatorIdentities {
    let ring = Ring::new(["p1", "p2", "p4", "y1", "y2", "y3", "y4"], MonomialOrder::Lex);
    let v = |i| MultiPoly::<Rational>::var(&ring, i);
    let (p1, p2, p4, y1, y2, y3, y4) = (v(0), v(1), v(2), v(3), v(4), v(5), v(6));
    let zero = MultiPoly::zero(&ring);
    let one = MultiPoly::one(&ring);
    let gamma = [[zero.clone(), one.clone()], [one.scale(&integer(-1)), zero.clone()]];
    let p = [[p1.clone(), p2.clone()], [p2.clone(), p4.clone()]];

    let matvec = |m: &[[MultiPoly<Rational>; 2]; 2], u: &[MultiPoly<Rational>; 2]| {
        [0, 1].map(|i| m[i][0].mul(&u[0]).unwrap().add(&m[i][1].mul(&u[1]).unwrap()).unwrap())
    };
    let dotp = |u: &[MultiPoly<Rational>; 2], w: &[MultiPoly<Rational>; 2]| {
        u[0].mul(&w[0]).unwrap().add(&u[1].mul(&w[1]).unwrap()).unwrap()
    };
    let yy = [y1.clone(), y2.clone()];
    let gy = matvec(&gamma, &yy);
    let quad = dotp(&gy, &matvec(&p, &gy));
    let two = integer(2);
    let d1 = y2
        .mul(&p1.mul(&y2).unwrap().sub(&p2.mul(&y1).unwrap().scale(&two)).unwrap())
        .unwrap()
        .add(&p4.mul(&y1.pow(2)).unwrap())
        .unwrap();
    // (y1,y2)Γ̃ᵀ(y3,y4)ᵀ = (Γ̃(y1,y2)ᵀ)·(y3,y4)
    let bil = dotp(&gy, &[y3.clone(), y4.clone()]);
    let d2 = y2.mul(&y3).unwrap().sub(&y1.mul(&y4).unwrap()).unwrap();
    DenominatorIdentities {
        first_defect: d1.sub(&quad).unwrap(),
        second_defect: d2.sub(&bil).unwrap(),
    }
}

#[derive(Debug, Clone)]
pub struct DegenerateReport {
    /// Entries of `L(x)²` over `ℚ(i)[x1, x2]`.
    pub l_squared: [MultiPoly<GaussianRational>; 4],
    pub trace_l_squared: MultiPoly<GaussianRational>,
    /// A `B` making the family a Lax pair (free entries set to zero).
    pub b: Option<[GaussianRational; 4]>,
    pub residuals: Vec<GaussianRational>,
}

impl DegenerateReport {
    pub fn l_squared_zero(&self) -> bool {
        self.l_squared.iter().all(MultiPoly::is_zero)
    }

    pub fn equations_satisfied(&self) -> bool {
        self.b.is_some() && self.residuals.iter().all(Zero::is_zero)
    }

    pub fn passed(&self) -> bool {
        self.l_squared_zero() && self.trace_l_squared.is_zero() && self.equations_satisfied()
    }
}

fn gauss(r: &Rational) -> GaussianRational {
    Complex::new(r.clone(), Rational::zero())
}

/// The nilpotent family for `p1 = p4`, `p3 = −p2`:
/// `L = [[ix1 − x2, (x2 − ix1)y2], [(ix1 − x2)/y2, x2 − ix1]]`.
pub fn degenerate_family_check(p1: &Rational, p2: &Rational, y2: &Rational) -> Result<DegenerateReport, GroebnerError> {
    if p1.is_zero() || p2.is_zero() {
        return Err(GroebnerError::BadParameters { what: "p1 and p2 must be nonzero" });
    }
    if y2.is_zero() {
        return Err(GroebnerError::BadParameters { what: "y2 must be nonzero" });
    }
    let i = Complex::new(Rational::zero(), Rational::one());
    let one = gauss(&Rational::one());
    let y2c = gauss(y2);
    let a = [i.clone(), -one.clone(), i.clone() / y2c.clone(), -one.clone() / y2c.clone()];
    let y = [-(i.clone() * y2c.clone()), y2c, -i.clone(), one.clone()];

    let xr = Ring::new(["x1", "x2"], MonomialOrder::Lex);
    let x1 = MultiPoly::var(&xr, 0);
    let x2 = MultiPoly::var(&xr, 1);
    let lin = |c1: &GaussianRational, c2: &GaussianRational| x1.scale(c1).add(&x2.scale(c2)).unwrap();
    let l = [[lin(&a[0], &a[1]), lin(&y[0], &y[1])], [lin(&a[2], &a[3]), lin(&y[2], &y[3])]];
    let sq = |r: usize, c: usize| {
        l[r][0]
            .mul(&l[0][c])
            .unwrap()
            .add(&l[r][1].mul(&l[1][c]).unwrap())
            .unwrap()
    };
    let l_squared = [sq(0, 0), sq(0, 1), sq(1, 0), sq(1, 1)];
    let trace_l_squared = l_squared[0].add(&l_squared[3]).unwrap();

    // The equations are linear in b once a and y are fixed.
    let ring = Ring::new(ANSATZ_VARIABLES, MonomialOrder::Lex);
    let pg = [gauss(p1), gauss(p2), gauss(&-p2.clone()), gauss(p1)].map(|c| MultiPoly::constant(&ring, c));
    let eqs = ansatz_equations(&ring, &pg);
    let mut reduced = Vec::with_capacity(8);
    for e in &eqs {
        let mut f = e.clone();
        for k in 0..4 {
            f = f.substitute_value(A + k, &a[k]);
            f = f.substitute_value(Y + k, &y[k]);
        }
        reduced.push(f);
    }
    let b = solve_linear_in_b(&reduced);
    let residuals = match &b {
        Some(bv) => {
            let mut point: Vec<GaussianRational> = bv.to_vec();
            point.extend(a.iter().cloned());
            point.extend(y.iter().cloned());
            eqs.iter().map(|e| e.eval(&point)).collect()
        }
        None => Vec::new(),
    };
    Ok(DegenerateReport {
        l_squared,
        trace_l_squared,
        b,
        residuals,
    })
}

/// Solves affine equations in `b1..b4` by exact elimination; free unknowns
/// are set to zero. `None` when inconsistent.
fn solve_linear_in_b(eqs: &[MultiPoly<GaussianRational>]) -> Option<[GaussianRational; 4]> {
    let zero = GaussianRational::zero();
    let mut rows: Vec<Vec<GaussianRational>> = eqs
        .iter()
        .map(|e| {
            let arity = e.ring().arity();
            let mut row: Vec<GaussianRational> = (0..4)
                .map(|k| {
                    let mut m = vec![0u16; arity];
                    m[B + k] = 1;
                    e.coefficient(&m)
                })
                .collect();
            row.push(-e.coefficient(&vec![0u16; arity]));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..4 {
        let Some(pr) = (r..rows.len()).find(|&k| !rows[k][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = GaussianRational::one() / rows[r][c].clone();
        for v in rows[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for k in 0..rows.len() {
            if k != r && !rows[k][c].is_zero() {
                let f = rows[k][c].clone();
                for j in 0..5 {
                    let d = f.clone() * rows[r][j].clone();
                    rows[k][j] = rows[k][j].clone() - d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[4].is_zero()) {
        return None;
    }
    let mut b = [zero.clone(), zero.clone(), zero.clone(), zero];
    for (k, &c) in pivots.iter().enumerate() {
        b[c] = rows[k][4].clone();
    }
    Some(b)
}
