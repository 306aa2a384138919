use torfib::corpus::{generate_all, manifest, CorpusParams};

#[test]
fn default_corpus_covers_the_interesting_cases() {
    let params = CorpusParams::default();
    let all = generate_all(&params).unwrap();
    assert_eq!(all.len(), 200);

    let factors = || all.iter().flat_map(|i| [i.s().clone(), i.t().clone()]);
    let square_zero = factors().filter(|a| a.max_ideal_power(2).dim() == 0).count();
    let cube_nonzero = factors().filter(|a| a.max_ideal_power(3).dim() > 0).count();
    assert!(square_zero > 0, "no factor with square-zero maximal ideal");
    assert!(cube_nonzero > 0, "no factor with nonzero cube of the maximal ideal");

    let modules = || all.iter().flat_map(|i| [&i.x, &i.y, &i.z, &i.w, &i.m, &i.n]);
    let free = modules().filter(|m| !m.is_zero() && m.is_free()).count();
    let zero = modules().filter(|m| m.is_zero()).count();
    let multi = modules().filter(|m| m.betti0() >= 2).count();
    let nonfree = modules().filter(|m| !m.is_free()).count();
    assert!(free > 0 && zero > 0 && multi > 0 && nonfree > 0, "free {free}, zero {zero}, multi {multi}");

    for inst in &all {
        assert!(inst.s().dim() <= params.max_dim && inst.t().dim() <= params.max_dim);
        assert_eq!(inst.r().dim(), inst.s().dim() + inst.t().dim() - 1);
        assert_eq!(inst.p(), params.p);
    }

    let lines = manifest(&params).unwrap();
    assert_eq!(lines.len(), 200);
    let prefix = CorpusParams { count: 20, ..params.clone() };
    assert_eq!(manifest(&prefix).unwrap(), lines[..20]);
}

#[test]
fn different_seeds_give_different_corpora() {
    let a = CorpusParams { count: 10, ..CorpusParams::default() };
    let b = CorpusParams { seed: 43, ..a.clone() };
    assert_ne!(manifest(&a).unwrap(), manifest(&b).unwrap());
}
