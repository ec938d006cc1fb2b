//! The subtraction-algebra counterexample: a normal epimorphism whose
//! product with an identity is not normal.
//!
//! Every assertion is checked as stated and reported with certificates,
//! whether it holds or not. A supplementary check runs the instance that
//! does exhibit the failure of products commuting with coequalizers in
//! the variety of `X`.

use std::sync::Arc;

use pcoeq::clone::find_subtraction;
use pcoeq::coeq::{normal_epi_comparison, p_zero_trick_comparison, KernelComparison, ParallelPair};
use pcoeq::constructions::product;
use pcoeq::decide::decide_p;
use pcoeq::fixtures;
use pcoeq::io::algebra_to_json;
use pcoeq::{congruence_generated, Element, Error, FiniteAlgebra, Homomorphism, Limits, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::validate::Certificate;

/// The data of the counterexample, possibly with `X` relabelled.
#[derive(Debug, Clone)]
pub struct CounterexampleData {
    pub x: Arc<FiniteAlgebra>,
    pub y: Arc<FiniteAlgebra>,
    /// `f : X -> Y` as a map of indices.
    pub f: Vec<Element>,
    pub zero: Element,
    pub a: Element,
    pub b: Element,
    /// `c ∈ Y`.
    pub c: Element,
}

impl CounterexampleData {
    pub fn builtin() -> Self {
        let x = fixtures::subtraction_x();
        let y = fixtures::subtraction_y();
        CounterexampleData {
            zero: x.element("0").expect("0"),
            a: x.element("a").expect("a"),
            b: x.element("b").expect("b"),
            c: y.element("c").expect("c"),
            f: fixtures::subtraction_f_map(),
            x: Arc::new(x),
            y: Arc::new(y),
        }
    }

    /// The same data with element `i` of `X` moved to position `perm[i]`.
    pub fn relabelled(&self, perm: &[usize]) -> Result<Self> {
        let x = permute(&self.x, perm)?;
        let mut f = vec![0; self.f.len()];
        for (i, &fi) in self.f.iter().enumerate() {
            f[perm[i]] = fi;
        }
        Ok(CounterexampleData {
            x: Arc::new(x),
            y: self.y.clone(),
            f,
            zero: perm[self.zero],
            a: perm[self.a],
            b: perm[self.b],
            c: self.c,
        })
    }
}

/// Isomorphic copy of `alg` with element `i` at position `perm[i]`.
pub fn permute(alg: &FiniteAlgebra, perm: &[usize]) -> Result<FiniteAlgebra> {
    let n = alg.size();
    let mut inverse = vec![usize::MAX; n];
    for (i, &p) in perm.iter().enumerate() {
        if p >= n || inverse[p] != usize::MAX {
            return Err(Error::Format(format!(
                "{perm:?} is not a permutation of 0..{n}"
            )));
        }
        inverse[p] = i;
    }
    if perm.len() != n {
        return Err(Error::Format(format!(
            "{perm:?} is not a permutation of 0..{n}"
        )));
    }
    let mut scratch = Vec::new();
    let out = FiniteAlgebra::from_fn(alg.name(), n, alg.signature(), |sym, args| {
        scratch.clear();
        scratch.extend(args.iter().map(|&e| inverse[e]));
        perm[alg.apply(sym, &scratch)]
    })?;
    let labels = (0..n).map(|e| alg.label(inverse[e])).collect();
    out.with_labels(labels)
}

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: &'static str,
    pub holds: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<Certificate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub assertions: Vec<Assertion>,
    pub supplementary: Assertion,
    /// Labels of `((a,c),(b,c))`.
    pub pair: [[String; 2]; 2],
    pub sizes: Vec<(&'static str, usize)>,
}

impl CounterexampleReport {
    pub fn all_hold(&self) -> bool {
        self.assertions.iter().all(|a| a.holds)
    }
}

/// First operation and argument tuple at which `map` fails to commute.
pub fn non_commuting(
    source: &FiniteAlgebra,
    target: &FiniteAlgebra,
    map: &[Element],
) -> Option<(usize, Vec<Element>)> {
    let n = source.size();
    for sym in 0..source.signature().len() {
        let tsym = target.signature().index_of(source.signature().name(sym))?;
        let k = source.signature().arity(sym);
        for flat in 0..n.pow(k as u32) {
            let mut args = vec![0; k];
            let mut rest = flat;
            for slot in args.iter_mut().rev() {
                *slot = rest % n;
                rest /= n;
            }
            let images: Vec<_> = args.iter().map(|&a| map[a]).collect();
            if map[source.apply(sym, &args)] != target.apply(tsym, &images) {
                return Some((sym, args));
            }
        }
    }
    None
}

fn not_hom_certificate(
    source: &FiniteAlgebra,
    target: &FiniteAlgebra,
    map: &[Element],
) -> Vec<Certificate> {
    non_commuting(source, target, map)
        .map(|(sym, args)| Certificate::NotHomomorphism {
            source: algebra_to_json(source),
            target: algebra_to_json(target),
            map: map.to_vec(),
            symbol: source.signature().name(sym).to_string(),
            args,
        })
        .into_iter()
        .collect()
}

/// Certificates for the verdict of a kernel comparison: equality, or the
/// pair on which the generated congruence and the kernel disagree.
pub fn comparison_certificates(cmp: &KernelComparison) -> Result<Vec<Certificate>> {
    let algebra = algebra_to_json(&cmp.algebra);
    let generators = cmp.generators.clone();
    let kernel = cmp.kernel.reps().to_vec();
    Ok(match cmp.difference() {
        None => vec![Certificate::CongruenceEqual {
            algebra,
            generators,
            kernel,
        }],
        Some((pair, true)) => vec![Certificate::NonMembership {
            algebra,
            generators,
            pair,
            kernel: Some(kernel),
        }],
        Some((pair, false)) => {
            let (_, trace) = congruence_generated(&cmp.algebra, &generators)?;
            let trace = trace
                .justify(pair.0, pair.1)
                .ok_or_else(|| Error::Internal("generated pair without justification".into()))?;
            vec![
                Certificate::Membership {
                    algebra,
                    generators,
                    pair,
                    trace: trace.to_json(&cmp.algebra),
                },
                Certificate::Separated { map: kernel, pair },
            ]
        }
    })
}

/// Runs the five assertions and the supplementary check.
pub fn verify_counterexample(
    data: &CounterexampleData,
    limits: &Limits,
) -> Result<CounterexampleReport> {
    let CounterexampleData {
        x,
        y,
        f,
        zero,
        a,
        b,
        c,
        ..
    } = data;
    let (zero, a, b, c) = (*zero, *a, *b, *c);
    let y_zero = y.require_zero()?;
    let xy = product(x, y)?;
    let yy = product(y, y)?;
    let mut assertions = Vec::with_capacity(5);

    // f is a normal epimorphism
    assertions.push(match Homomorphism::new(x.clone(), y.clone(), f.clone()) {
        Err(e) => Assertion {
            name: "f is a normal epimorphism",
            holds: false,
            detail: e.to_string(),
            certificates: not_hom_certificate(x, y, f),
        },
        Ok(hom) => {
            let cmp = normal_epi_comparison(&hom)?;
            Assertion {
                name: "f is a normal epimorphism",
                holds: cmp.difference().is_none(),
                detail: "kernel compared with the congruence generated by the kernel class of 0"
                    .into(),
                certificates: comparison_certificates(&cmp)?,
            }
        }
    });

    // f × 1_Y is not a normal epimorphism
    let fy_map: Vec<Element> = (0..xy.algebra.size())
        .map(|e| {
            let (s, t) = xy.split(e);
            yy.pair(f[s], t)
        })
        .collect();
    let fy_hom = Homomorphism::new(xy.algebra.clone(), yy.algebra.clone(), fy_map.clone());
    assertions.push(match &fy_hom {
        Err(e) => Assertion {
            name: "f × 1_Y is not a normal epimorphism",
            holds: false,
            detail: e.to_string(),
            certificates: not_hom_certificate(&xy.algebra, &yy.algebra, &fy_map),
        },
        Ok(hom) => {
            let cmp = normal_epi_comparison(hom)?;
            Assertion {
                name: "f × 1_Y is not a normal epimorphism",
                holds: cmp.difference().is_some(),
                detail: "kernel compared with the congruence generated by the kernel class of 0"
                    .into(),
                certificates: comparison_certificates(&cmp)?,
            }
        }
    });

    // ((a,c),(b,c)) ∈ Eq(f × 1_Y) \ Cg((a,0),(0,0))
    let e1 = xy.pair(a, c);
    let e2 = xy.pair(b, c);
    let gens = vec![(xy.pair(a, y_zero), xy.pair(zero, y_zero))];
    let in_eq = fy_map[e1] == fy_map[e2];
    let (generated, trace) = congruence_generated(&xy.algebra, &gens)?;
    let in_cg = generated.related(e1, e2);
    let mut certificates = Vec::new();
    if !in_eq {
        certificates.push(Certificate::Separated {
            map: fy_map.clone(),
            pair: (e1, e2),
        });
    }
    if in_cg {
        let why = trace
            .justify(e1, e2)
            .ok_or_else(|| Error::Internal("generated pair without justification".into()))?;
        certificates.push(Certificate::Membership {
            algebra: algebra_to_json(&xy.algebra),
            generators: gens.clone(),
            pair: (e1, e2),
            trace: why.to_json(&xy.algebra),
        });
    } else {
        certificates.push(Certificate::NonMembership {
            algebra: algebra_to_json(&xy.algebra),
            generators: gens.clone(),
            pair: (e1, e2),
            kernel: None,
        });
    }
    assertions.push(Assertion {
        name: "((a,c),(b,c)) ∈ Eq(f × 1_Y) \\ Cg((a,0),(0,0))",
        holds: in_eq && !in_cg,
        detail: format!(
            "in Eq(f × 1_Y): {in_eq}; in Cg((a,0),(0,0)): {in_cg} ({} blocks of {})",
            generated.partition().num_blocks(),
            xy.algebra.size()
        ),
        certificates,
    });

    // X has a subtraction term
    let sub = find_subtraction(x, limits)?;
    assertions.push(Assertion {
        name: "X has a subtraction term",
        holds: sub.is_some(),
        detail: match &sub {
            Some(t) => t.render(x.signature(), &["x", "y"]),
            None => "no binary term operation satisfies the identities".into(),
        },
        certificates: if sub.is_some() {
            Vec::new()
        } else {
            vec![Certificate::NoTerm {
                algebra: algebra_to_json(x),
                term_kind: "subtraction".into(),
            }]
        },
    });

    // decide_P(X) = false
    let decision = decide_p(x, limits)?;
    let inst = &decision.instance;
    assertions.push(Assertion {
        name: "decide_P(X) = false",
        holds: !decision.holds(),
        detail: format!(
            "generic instance of {} elements; target {:?} ~ {:?}",
            inst.algebra.size(),
            inst.describe(inst.target.0),
            inst.describe(inst.target.1)
        ),
        certificates: if decision.holds() {
            Vec::new()
        } else {
            vec![Certificate::NonMembership {
                algebra: algebra_to_json(&inst.algebra),
                generators: vec![inst.generator],
                pair: inst.target,
                kernel: None,
            }]
        },
    });

    // Supplementary: u, v : {0,a} ⇉ X with v(a) = b, against the trivial
    // pair on Y.
    let s = Arc::new(x.restrict("S", &[zero, a])?);
    let pair = ParallelPair::new(
        Homomorphism::new(s.clone(), x.clone(), vec![zero, a])?,
        Homomorphism::new(s.clone(), x.clone(), vec![zero, b])?,
    )?;
    let (cmp, targets) = p_zero_trick_comparison(&pair, y)?;
    let diff = cmp.difference();
    let supplementary = Assertion {
        name: "((a,c),(b,c)) ∈ Eq(q × 1_Y) \\ Cg((a,0),(b,0)) for the coequalizer q of the inclusion {0,a} → X and a ↦ b",
        holds: diff == Some(((e1, e2), true)) || diff == Some(((e2, e1), true)),
        detail: match diff {
            None => "q × 1_Y is the coequalizer".into(),
            Some((p, in_kernel)) => format!(
                "least disagreement at {:?} / {:?} (in Eq(q × 1_Y): {in_kernel})",
                targets.split(p.0),
                targets.split(p.1)
            ),
        },
        certificates: comparison_certificates(&cmp)?,
    };

    Ok(CounterexampleReport {
        assertions,
        supplementary,
        pair: [[x.label(a), y.label(c)], [x.label(b), y.label(c)]],
        sizes: vec![
            ("X", x.size()),
            ("Y", y.size()),
            ("X×Y", xy.algebra.size()),
            ("generic", inst.algebra.size()),
        ],
    })
}

pub fn report_details(rep: &CounterexampleReport) -> Value {
    json!({
        "assertions": rep.assertions,
        "supplementary": rep.supplementary,
        "pair": rep.pair,
    })
}
