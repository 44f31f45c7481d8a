use super::poly::{GeneratorId, Poly};
use crate::game::Game;
use crate::rational::Rational;
use crate::transforms::{
    bisynchronize, symmetrize, three_output_reduce, zero_relation_normalize, zr_tuples, TransformKind, ZrOptions,
};
use crate::{Error, Result};

/// A linear assignment `e ↦ Σ α f` from generators of a source algebra to
/// generator combinations of a target algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMap {
    source: (usize, usize),
    target: (usize, usize),
    images: Vec<Poly>,
}

impl GeneratorMap {
    /// `images[x * k + a]` is the image of `e_{a,x}`. Images must be pure
    /// generator combinations over the target.
    pub fn new(source: (usize, usize), target: (usize, usize), images: Vec<Poly>) -> Result<Self> {
        let expected = source.0 * source.1;
        if images.len() != expected {
            return Err(Error::Shape {
                expected,
                found: images.len(),
            });
        }
        for (i, img) in images.iter().enumerate() {
            for (w, _) in img.terms() {
                if w.len() != 1 {
                    return Err(Error::Domain(format!(
                        "image of generator {i} has a term of degree {}",
                        w.len()
                    )));
                }
                if w[0].question >= target.0 || w[0].answer >= target.1 {
                    return Err(Error::OutOfRange(format!("image of generator {i} mentions {}", w[0])));
                }
            }
        }
        Ok(GeneratorMap { source, target, images })
    }

    pub fn identity(n: usize, k: usize) -> Self {
        let images = (0..n * k)
            .map(|i| Poly::generator(GeneratorId::from_index(i, k)))
            .collect();
        GeneratorMap {
            source: (n, k),
            target: (n, k),
            images,
        }
    }

    /// `(n, k)` of the source game.
    pub fn source(&self) -> (usize, usize) {
        self.source
    }

    pub fn target(&self) -> (usize, usize) {
        self.target
    }

    pub fn image(&self, g: GeneratorId) -> &Poly {
        &self.images[g.index(self.source.1)]
    }

    /// The coefficient of `f` in the image of `e`.
    pub fn coefficient(&self, e: GeneratorId, f: GeneratorId) -> Rational {
        self.image(e).coeff(&[f])
    }

    /// Nonzero `(f, α)` pairs of the image of `e`.
    pub fn image_terms(&self, e: GeneratorId) -> Vec<(GeneratorId, Rational)> {
        self.image(e).terms().map(|(w, c)| (w[0], *c)).collect()
    }

    pub fn apply(&self, p: &Poly) -> Poly {
        p.substitute(|g| self.image(g).clone())
    }

    /// Images have rational (hence real) coefficients and no constant term.
    pub fn is_structurally_self_adjoint(&self) -> bool {
        self.images.iter().all(|img| img.terms().all(|(w, _)| w.len() == 1))
    }
}

/// A transform applied to a game together with its generator maps:
/// `forward: A(source) → A(target)` and `backward: A(target) → A(source)`.
#[derive(Debug, Clone)]
pub struct MapPair {
    pub kind: TransformKind,
    pub source: Game,
    pub target: Game,
    pub forward: GeneratorMap,
    pub backward: GeneratorMap,
}

pub fn builtin_maps(kind: TransformKind, g: &Game) -> Result<MapPair> {
    builtin_maps_with(kind, g, ZrOptions::default())
}

pub fn builtin_maps_with(kind: TransformKind, g: &Game, opts: ZrOptions) -> Result<MapPair> {
    let (n, k) = (g.n(), g.k());
    let gen = |q: usize, a: usize| Poly::generator(GeneratorId::new(q, a));
    let sum =
        |x: usize, answers: &mut dyn Iterator<Item = usize>| Poly::sum_of(answers.map(|a| GeneratorId::new(x, a)));
    let (target, forward, backward) = match kind {
        TransformKind::Symmetrize => {
            let t = symmetrize(g);
            (t, GeneratorMap::identity(n, k), GeneratorMap::identity(n, k))
        }
        TransformKind::Bisync => {
            let t = bisynchronize(g)?;
            let size = n * k;
            let fwd = (0..n * k)
                .map(|i| {
                    let e = GeneratorId::from_index(i, k);
                    gen(e.answer * n + e.question, e.question)
                })
                .collect();
            let bwd = (0..size * size)
                .map(|i| {
                    let f = GeneratorId::from_index(i, size);
                    let (a, x) = (f.question / n, f.question % n);
                    let (ans, v) = (f.answer / n, f.answer % n);
                    if v == x {
                        gen(x, (a + k - ans) % k)
                    } else {
                        Poly::zero()
                    }
                })
                .collect();
            (
                t,
                GeneratorMap::new((n, k), (size, size), fwd)?,
                GeneratorMap::new((size, size), (n, k), bwd)?,
            )
        }
        TransformKind::ThreeOut => {
            let t = three_output_reduce(g)?;
            let last = k - 3;
            let fwd = (0..n * k)
                .map(|i| {
                    let e = GeneratorId::from_index(i, k);
                    let (a, x) = (e.answer, e.question);
                    match a {
                        0 => gen(x, 0),
                        a if a == k - 1 => gen(last * n + x, 2),
                        a => gen((a - 1) * n + x, 1),
                    }
                })
                .collect();
            let size = t.n();
            let bwd = (0..size * 3)
                .map(|i| {
                    let f = GeneratorId::from_index(i, 3);
                    let (c, x) = (f.question / n, f.question % n);
                    match f.answer {
                        0 => sum(x, &mut (0..=c)),
                        1 => gen(x, c + 1),
                        _ => sum(x, &mut (c + 2..k)),
                    }
                })
                .collect();
            (
                t,
                GeneratorMap::new((n, k), (size, 3), fwd)?,
                GeneratorMap::new((size, 3), (n, k), bwd)?,
            )
        }
        TransformKind::ZeroRelation => {
            let (t, _) = zero_relation_normalize(g, opts)?;
            let tuples = zr_tuples(g, opts);
            let size = t.n();
            let bwd = (0..size * 3)
                .map(|i| {
                    let f = GeneratorId::from_index(i, 3);
                    if f.question < n {
                        return gen(f.question, f.answer);
                    }
                    let [a, b, x, y] = tuples[f.question - n];
                    match f.answer {
                        0 => gen(x, a),
                        1 => gen(y, b),
                        _ => &sum(x, &mut (0..3).filter(|&c| c != a)) - &gen(y, b),
                    }
                })
                .collect();
            let fwd = (0..n * 3)
                .map(|i| Poly::generator(GeneratorId::from_index(i, 3)))
                .collect();
            (
                t,
                GeneratorMap::new((n, 3), (size, 3), fwd)?,
                GeneratorMap::new((size, 3), (n, 3), bwd)?,
            )
        }
    };
    Ok(MapPair {
        kind,
        source: g.clone(),
        target,
        forward,
        backward,
    })
}
