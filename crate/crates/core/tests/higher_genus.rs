use ogw_core::exactalg::{rat, Laurent, Monomial};
use ogw_core::fixed_point::spec_contribution;
use ogw_core::genus0::ogw_genus0;
use ogw_core::higher_genus::{enumerate_morphisms, ogw, EvalPath};
use ogw_core::spec_core::{label_set, LabelSet};
use ogw_core::{DescendentProblem, Error, ModuliSpec, Sign, SpecComponent};

fn names(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

fn problems(n: usize, total: u32) -> Vec<DescendentProblem> {
    let mut out = Vec::new();
    for a in ogw_core::oracles::exponent_vectors(total, n) {
        for mask in 0..1usize << n {
            let eps: Vec<Sign> = (0..n).map(|i| if mask >> i & 1 == 1 { Sign::Minus } else { Sign::Plus }).collect();
            let a: Vec<i64> = a.iter().map(|&x| x as i64).collect();
            out.push(DescendentProblem::from_lists(&names(n), &a, &eps));
        }
    }
    out
}

#[test]
fn genus_zero_agreement_off_dimension() {
    // beyond the dimension-matched slice as well
    for n in 0..=2usize {
        let labels: LabelSet = names(n).into_iter().collect();
        for dp in 0..=2u32 {
            for dm in 0..=2u32 {
                if dp + dm == 0 || dp + dm > 3 {
                    continue;
                }
                let t = SpecComponent::disk(labels.clone(), (dp, dm));
                if t.validate().is_err() {
                    continue;
                }
                for total in 0..=(dp + dm) {
                    for p in problems(n, total) {
                        let want = ogw_genus0(&labels, (dp, dm), &p).unwrap();
                        let got = ogw(&ModuliSpec::single(t.clone()), &p, EvalPath::Compact).unwrap();
                        assert_eq!(got, want, "{t} {p:?}");
                    }
                }
            }
        }
    }
}

fn higher_targets() -> Vec<SpecComponent> {
    vec![
        SpecComponent::new(0, label_set(["1"]), (2, 0), vec![1, 1]),
        SpecComponent::new(0, LabelSet::new(), (1, 1), vec![-1, 1]),
        SpecComponent::new(0, label_set(["1"]), (1, 1), vec![0, 0]),
        SpecComponent::new(0, label_set(["1"]), (2, 1), vec![0, 1]),
        SpecComponent::new(1, label_set(["1"]), (1, 0), vec![1]),
    ]
}

#[test]
fn higher_genus_paths_agree_and_homogeneous() {
    for t in higher_targets() {
        let n = t.labels.len();
        let spec = ModuliSpec::single(t.clone());
        for total in 0..=(t.d.0 + t.d.1 + 1) {
            for p in problems(n, total) {
                let a = ogw(&spec, &p, EvalPath::Compact).unwrap();
                let b = ogw(&spec, &p, EvalPath::GraphSum).unwrap();
                assert_eq!(a, b, "{t} {p:?}");
                match a.is_monomial() {
                    Monomial::Zero => {}
                    Monomial::Term(k, _) => {
                        assert_eq!(k, total as i64 + 1 - (t.d.0 + t.d.1) as i64 - t.genus(), "{t} {p:?}")
                    }
                    Monomial::NotMonomial => panic!("not a monomial: {t} {p:?} {a:?}"),
                }
            }
        }
    }
}

#[test]
fn known_higher_genus_values() {
    // regression values; the other path agrees (see above)
    let p = DescendentProblem::from_lists(&names(1), &[2], &[Sign::Plus]);
    let annulus = ModuliSpec::single(SpecComponent::new(0, label_set(["1"]), (2, 0), vec![1, 1]));
    assert_eq!(ogw(&annulus, &p, EvalPath::Compact).unwrap(), Laurent::constant(rat(1, 4)));
    let handle = ModuliSpec::single(SpecComponent::new(1, label_set(["1"]), (1, 0), vec![1]));
    assert_eq!(ogw(&handle, &p, EvalPath::GraphSum).unwrap(), Laurent::constant(rat(1, 24)));
}

#[test]
fn closed_targets_use_identity_only() {
    let p = DescendentProblem::from_lists(&names(1), &[2], &[Sign::Plus]);
    for gs in 0..=1u32 {
        let t = SpecComponent::new(gs, label_set(["1"]), (1, 1), vec![]);
        let spec = ModuliSpec::single(t.clone());
        assert_eq!(enumerate_morphisms(&spec).unwrap().len(), 1);
        let p = if gs == 0 { DescendentProblem::from_lists(&names(1), &[0], &[Sign::Plus]) } else { p.clone() };
        assert_eq!(ogw(&spec, &p, EvalPath::Compact).unwrap(), spec_contribution(&spec, &p).unwrap());
        assert_eq!(ogw(&spec, &p, EvalPath::GraphSum).unwrap(), spec_contribution(&spec, &p).unwrap());
    }
}

#[test]
fn genus_gate() {
    let t = SpecComponent::new(2, label_set(["1"]), (1, 1), vec![]);
    let p = DescendentProblem::from_lists(&names(1), &[5], &[Sign::Plus]);
    let e = ogw(&ModuliSpec::single(t), &p, EvalPath::Compact).unwrap_err();
    assert!(matches!(e, Error::HodgeUnsupported { .. }));
    assert!(e.to_string().contains("graph"));
}

#[test]
fn disconnected_target() {
    // two distinguishable disks: the invariant factors
    let a = SpecComponent::disk(label_set(["1"]), (2, 0));
    let b = SpecComponent::disk(label_set(["2"]), (1, 0));
    let p = DescendentProblem::from_lists(&names(2), &[1, 0], &[Sign::Plus, Sign::Plus]);
    let both = ogw(&ModuliSpec::new(vec![a.clone(), b.clone()]), &p, EvalPath::Compact).unwrap();
    let pa = ogw(&ModuliSpec::single(a.clone()), &p.restrict(&a.labels), EvalPath::Compact).unwrap();
    let pb = ogw(&ModuliSpec::single(b.clone()), &p.restrict(&b.labels), EvalPath::Compact).unwrap();
    assert_eq!(both, pa * pb);
}
