//! Numeric experiments for identities between orthogonal projections.
//!
//! Instances are built from random orthonormal frames: a projection is
//! `B Bᵀ` for a set of frame columns `B`, and a second description of the
//! same subspace uses `B R` for a random orthogonal `R`, so "equal"
//! projections are computed independently.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::par::{self, Exec};
use crate::{Error, Result};

/// Residual below which a relation counts as holding.
pub const HOLD_TOL: f64 = 1e-8;
/// Required accuracy on instances satisfying the hypotheses.
pub const POSITIVE_TOL: f64 = 1e-10;
/// Required separation on instances violating them.
pub const NEGATIVE_MARGIN: f64 = 1e-6;

type Mat = DMatrix<f64>;

fn norm(m: &Mat) -> f64 {
    m.norm()
}

fn random_orthogonal(rng: &mut ChaCha8Rng, d: usize) -> Mat {
    loop {
        let m = Mat::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
        if m.determinant().abs() > 1e-3 {
            return m.qr().q();
        }
    }
}

/// Projection onto the span of the given frame columns, recomputed from a
/// randomly rotated basis of that span.
fn projection(rng: &mut ChaCha8Rng, frame: &Mat, cols: &[usize]) -> Mat {
    let d = frame.nrows();
    if cols.is_empty() {
        return Mat::zeros(d, d);
    }
    let basis = Mat::from_fn(d, cols.len(), |i, j| frame[(i, cols[j])]);
    let basis = &basis * random_orthogonal(rng, cols.len());
    &basis * basis.transpose()
}

fn random_projection(rng: &mut ChaCha8Rng, d: usize) -> Mat {
    let frame = random_orthogonal(rng, d);
    let rank = rng.gen_range(0..=d);
    projection(rng, &frame, &(0..rank).collect::<Vec<_>>())
}

/// A random split of `0..d` into `parts` consecutive (possibly empty) blocks.
fn split(rng: &mut ChaCha8Rng, d: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut cuts: Vec<usize> = (0..parts - 1).map(|_| rng.gen_range(0..=d)).collect();
    cuts.sort();
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for c in cuts.into_iter().chain([d]) {
        out.push((start..c).collect());
        start = c;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Lemma {
    /// `p + q = r` iff `pq = 0`, `p(1-r) = 0`, `q(1-r) = 0`, `(1-(p+q))r = 0`.
    SumOfTwo,
    /// `p = r` iff `p(1-r) = 0` and `r(1-p) = 0`.
    Equal,
    /// `p + q + r = 1` implies `pq = pr = qr = 0`.
    ThreeOutputs,
    /// For PVMs `{q_i}`, `{r_j}`: `q₁ + q₂ = r₁` iff `r₁q₃ = 0` and `q_i r_j = 0`, `i ≤ 2 ≤ j`.
    TwoPvms,
}

impl Lemma {
    pub const ALL: [Lemma; 4] = [Lemma::SumOfTwo, Lemma::Equal, Lemma::ThreeOutputs, Lemma::TwoPvms];
}

/// Residuals of the two sides of one instance.
#[derive(Debug, Clone, Copy)]
struct Sides {
    lhs: f64,
    rhs: f64,
}

fn sum_of_two_sides(p: &Mat, q: &Mat, r: &Mat) -> Sides {
    let one = Mat::identity(p.nrows(), p.ncols());
    let rel = [
        norm(&(p * q)),
        norm(&(p * (&one - r))),
        norm(&(q * (&one - r))),
        norm(&((&one - (p + q)) * r)),
    ];
    Sides {
        lhs: norm(&(p + q - r)),
        rhs: rel.into_iter().fold(0.0, f64::max),
    }
}

fn equal_sides(p: &Mat, r: &Mat) -> Sides {
    let one = Mat::identity(p.nrows(), p.ncols());
    Sides {
        lhs: norm(&(p - r)),
        rhs: norm(&(p * (&one - r))).max(norm(&(r * (&one - p)))),
    }
}

fn three_output_sides(p: &Mat, q: &Mat, r: &Mat) -> Sides {
    let one = Mat::identity(p.nrows(), p.ncols());
    Sides {
        lhs: norm(&(p + q + r - one)),
        rhs: norm(&(p * q)).max(norm(&(p * r))).max(norm(&(q * r))),
    }
}

fn two_pvm_sides(q: &[Mat; 3], r: &[Mat; 3]) -> Sides {
    let mut rhs = norm(&(&r[0] * &q[2]));
    for qi in &q[..2] {
        for rj in &r[1..] {
            rhs = rhs.max(norm(&(qi * rj)));
        }
    }
    Sides {
        lhs: norm(&(&q[0] + &q[1] - &r[0])),
        rhs,
    }
}

fn pvm(rng: &mut ChaCha8Rng, frame: &Mat, blocks: &[Vec<usize>]) -> [Mat; 3] {
    [
        projection(rng, frame, &blocks[0]),
        projection(rng, frame, &blocks[1]),
        projection(rng, frame, &blocks[2]),
    ]
}

fn positive(lemma: Lemma, rng: &mut ChaCha8Rng, d: usize) -> Sides {
    let frame = random_orthogonal(rng, d);
    match lemma {
        Lemma::SumOfTwo => {
            let b = split(rng, d, 3);
            let p = projection(rng, &frame, &b[0]);
            let q = projection(rng, &frame, &b[1]);
            let r = projection(rng, &frame, &[b[0].clone(), b[1].clone()].concat());
            sum_of_two_sides(&p, &q, &r)
        }
        Lemma::Equal => {
            let b = split(rng, d, 2);
            let p = projection(rng, &frame, &b[0]);
            let r = projection(rng, &frame, &b[0]);
            equal_sides(&p, &r)
        }
        Lemma::ThreeOutputs => {
            let blocks = split(rng, d, 3);
            let [p, q, r] = pvm(rng, &frame, &blocks);
            three_output_sides(&p, &q, &r)
        }
        Lemma::TwoPvms => {
            let b = split(rng, d, 3);
            let q = pvm(rng, &frame, &b);
            // r₁ spans q₁ + q₂; r₂, r₃ split q₃'s range in a rotated frame.
            let r1 = projection(rng, &frame, &[b[0].clone(), b[1].clone()].concat());
            let rest = Mat::from_fn(d, b[2].len(), |i, j| frame[(i, b[2][j])]);
            let rot = if b[2].is_empty() {
                rest
            } else {
                &rest * random_orthogonal(rng, b[2].len())
            };
            let cut = rng.gen_range(0..=b[2].len());
            let mut sub = frame.clone();
            for (j, col) in b[2].iter().enumerate() {
                sub.set_column(*col, &rot.column(j));
            }
            let r2 = projection(rng, &sub, &b[2][..cut]);
            let r3 = projection(rng, &sub, &b[2][cut..]);
            two_pvm_sides(&q, &[r1, r2, r3])
        }
    }
}

fn negative(lemma: Lemma, rng: &mut ChaCha8Rng, d: usize) -> Sides {
    loop {
        let sides = match lemma {
            Lemma::SumOfTwo => {
                let (p, q, r) = (
                    random_projection(rng, d),
                    random_projection(rng, d),
                    random_projection(rng, d),
                );
                sum_of_two_sides(&p, &q, &r)
            }
            Lemma::Equal => {
                let p = random_projection(rng, d);
                if rng.gen_bool(0.5) {
                    equal_sides(&p, &random_projection(rng, d))
                } else {
                    // Strictly nested ranges: exactly one of the two relations fails.
                    let frame = random_orthogonal(rng, d);
                    let m = rng.gen_range(0..d);
                    let small = projection(rng, &frame, &(0..m).collect::<Vec<_>>());
                    let top = rng.gen_range(m + 1..=d);
                    let big = projection(rng, &frame, &(0..top).collect::<Vec<_>>());
                    equal_sides(&small, &big)
                }
            }
            Lemma::ThreeOutputs => {
                let (p, q, r) = (
                    random_projection(rng, d),
                    random_projection(rng, d),
                    random_projection(rng, d),
                );
                three_output_sides(&p, &q, &r)
            }
            Lemma::TwoPvms => {
                let fq = random_orthogonal(rng, d);
                let fr = random_orthogonal(rng, d);
                let (bq, br) = (split(rng, d, 3), split(rng, d, 3));
                let q = pvm(rng, &fq, &bq);
                let r = pvm(rng, &fr, &br);
                two_pvm_sides(&q, &r)
            }
        };
        if sides.lhs > NEGATIVE_MARGIN {
            return sides;
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaStats {
    pub lemma: Lemma,
    pub dim: usize,
    pub positives: usize,
    pub negatives: usize,
    pub failures: usize,
    pub max_positive_residual: f64,
    pub min_negative_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionReport {
    pub seed: u64,
    pub trials: usize,
    pub lemmas: Vec<LemmaStats>,
    pub witnesses: Vec<Witness>,
}

impl ProjectionReport {
    pub fn passed(&self) -> bool {
        self.lemmas.iter().all(|l| l.failures == 0) && self.witnesses.iter().all(|w| w.ok)
    }

    pub fn max_positive_residual(&self) -> f64 {
        self.lemmas.iter().map(|l| l.max_positive_residual).fold(0.0, f64::max)
    }
}

fn trial_seed(seed: u64, lemma: Lemma, d: usize, trial: usize) -> u64 {
    let lemma_tag = Lemma::ALL.iter().position(|&l| l == lemma).expect("listed") as u64;
    seed ^ (lemma_tag << 56) ^ ((d as u64) << 40) ^ trial as u64
}

/// `trials` instances per lemma at dimension `d`: even trials satisfy the
/// hypotheses, odd ones violate them.
pub fn lemma_stats(lemma: Lemma, d: usize, trials: usize, seed: u64, exec: Exec) -> Result<LemmaStats> {
    if d < 2 {
        return Err(Error::Dimension(format!(
            "projection experiments need d >= 2 (got {d})"
        )));
    }
    let results = par::map_range(exec, trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, lemma, d, t));
        let pos = t % 2 == 0;
        let s = if pos {
            positive(lemma, &mut rng, d)
        } else {
            negative(lemma, &mut rng, d)
        };
        (pos, s)
    });
    let mut stats = LemmaStats {
        lemma,
        dim: d,
        positives: 0,
        negatives: 0,
        failures: 0,
        max_positive_residual: 0.0,
        min_negative_residual: f64::INFINITY,
    };
    for (pos, s) in results {
        // Both directions: each side must hold exactly when the other does.
        let agree = (s.lhs <= HOLD_TOL) == (s.rhs <= HOLD_TOL);
        if pos {
            stats.positives += 1;
            let worst = s.lhs.max(s.rhs);
            stats.max_positive_residual = stats.max_positive_residual.max(worst);
            if !agree || worst > POSITIVE_TOL {
                stats.failures += 1;
            }
        } else {
            stats.negatives += 1;
            let least = s.lhs.min(s.rhs);
            stats.min_negative_residual = stats.min_negative_residual.min(least);
            let ok = match lemma {
                Lemma::ThreeOutputs => s.lhs > NEGATIVE_MARGIN,
                _ => agree && least > NEGATIVE_MARGIN,
            };
            if !ok {
                stats.failures += 1;
            }
        }
    }
    Ok(stats)
}

fn diag(entries: &[f64]) -> Mat {
    Mat::from_diagonal(&nalgebra::DVector::from_row_slice(entries))
}

/// Exact 2×2 diagonal witnesses, including a violated instance that must
/// be rejected through its `pq ≠ 0` relation.
pub fn tiny_witnesses() -> Vec<Witness> {
    let p = diag(&[1.0, 0.0]);
    let q = diag(&[0.0, 1.0]);
    let one = Mat::identity(2, 2);
    let zero = Mat::zeros(2, 2);
    let mut out = Vec::new();

    let s = sum_of_two_sides(&p, &q, &one);
    out.push(Witness {
        name: "sum of two: diag(1,0) + diag(0,1) = 1".into(),
        ok: s.lhs == 0.0 && s.rhs == 0.0,
        detail: format!("residuals {:e}, {:e}", s.lhs, s.rhs),
    });

    let pq = norm(&(&p * &p));
    let s = sum_of_two_sides(&p, &p, &p);
    out.push(Witness {
        name: "sum of two: p = q = r = diag(1,0) is rejected".into(),
        ok: s.lhs > 0.0 && pq > 0.0,
        detail: format!("|p+q-r| = {}, |pq| = {}", s.lhs, pq),
    });

    let s = equal_sides(&p, &p.clone());
    out.push(Witness {
        name: "equal: diag(1,0) = diag(1,0)".into(),
        ok: s.lhs == 0.0 && s.rhs == 0.0,
        detail: format!("residuals {:e}, {:e}", s.lhs, s.rhs),
    });
    let s = equal_sides(&p, &one);
    out.push(Witness {
        name: "equal: diag(1,0) != 1 via r(1-p)".into(),
        ok: s.lhs > 0.0 && s.rhs > 0.0 && norm(&(&p - &p * &one)) == 0.0,
        detail: format!("residuals {}, {}", s.lhs, s.rhs),
    });

    let s = three_output_sides(&p, &q, &zero);
    out.push(Witness {
        name: "three outputs: diag(1,0) + diag(0,1) + 0 = 1".into(),
        ok: s.lhs == 0.0 && s.rhs == 0.0,
        detail: format!("residuals {:e}, {:e}", s.lhs, s.rhs),
    });

    let s = two_pvm_sides(
        &[p.clone(), q.clone(), zero.clone()],
        &[one.clone(), zero.clone(), zero.clone()],
    );
    out.push(Witness {
        name: "two PVMs: diag(1,0) + diag(0,1) = 1".into(),
        ok: s.lhs == 0.0 && s.rhs == 0.0,
        detail: format!("residuals {:e}, {:e}", s.lhs, s.rhs),
    });
    let s = two_pvm_sides(
        &[p.clone(), zero.clone(), q.clone()],
        &[one.clone(), zero.clone(), zero],
    );
    out.push(Witness {
        name: "two PVMs: diag(1,0) + 0 != 1 via r1 q3".into(),
        ok: s.lhs > 0.0 && s.rhs > 0.0,
        detail: format!("residuals {}, {}", s.lhs, s.rhs),
    });
    out
}

/// All four lemmas at dimension `d` plus the exact witnesses.
pub fn projection_lemma_suite(d: usize, trials: usize, seed: u64) -> Result<ProjectionReport> {
    projection_lemma_suite_in(&[d], trials, seed, Exec::default())
}

pub fn projection_lemma_suite_in(dims: &[usize], trials: usize, seed: u64, exec: Exec) -> Result<ProjectionReport> {
    let mut lemmas = Vec::new();
    for &d in dims {
        for lemma in Lemma::ALL {
            lemmas.push(lemma_stats(lemma, d, trials, seed, exec)?);
        }
    }
    Ok(ProjectionReport {
        seed,
        trials,
        lemmas,
        witnesses: tiny_witnesses(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witnesses_pass() {
        for w in tiny_witnesses() {
            assert!(w.ok, "{}: {}", w.name, w.detail);
        }
    }

    #[test]
    fn small_suite_passes() {
        let r = projection_lemma_suite_in(&[2, 5], 60, 7, Exec::Sequential).unwrap();
        for l in &r.lemmas {
            assert_eq!(l.failures, 0, "{l:?}");
            assert_eq!(l.positives + l.negatives, 60);
        }
        assert!(r.passed());
    }

    #[test]
    fn deterministic_across_exec() {
        let a = lemma_stats(Lemma::TwoPvms, 4, 20, 3, Exec::Sequential).unwrap();
        let b = lemma_stats(Lemma::TwoPvms, 4, 20, 3, Exec::Parallel).unwrap();
        assert_eq!(a.max_positive_residual, b.max_positive_residual);
        assert_eq!(a.min_negative_residual, b.min_negative_residual);
    }

    #[test]
    fn rejects_small_dimension() {
        assert!(projection_lemma_suite(1, 1, 0).is_err());
    }
}
