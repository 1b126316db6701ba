use proptest::prelude::*;

use circrep::morphisms::UniformMorphism;
use circrep::products::{product_exponent, FactorIndex};
use circrep::search::{longest_word, SearchConfig};
use circrep::words::{
    circular_critical_exponent, critical_exponent, exponent, is_circularly_power_free, is_power_free, shortest_period,
};
use circrep::{PowerThreshold, Rational, Symbol, Word};

fn word(max_k: u8, max_len: usize) -> impl Strategy<Value = Word> {
    (1..=max_k)
        .prop_flat_map(move |k| prop::collection::vec(0..k, 1..=max_len).prop_map(move |s| Word::new(s, k).unwrap()))
}

fn builtin() -> impl Strategy<Value = UniformMorphism> {
    prop_oneof![Just(UniformMorphism::mu()), Just(UniformMorphism::psi()), Just(UniformMorphism::thue_morse())]
}

fn endomorphism() -> impl Strategy<Value = UniformMorphism> {
    prop_oneof![Just(UniformMorphism::psi()), Just(UniformMorphism::thue_morse())]
}

fn synchronizing() -> impl Strategy<Value = UniformMorphism> {
    prop_oneof![Just(UniformMorphism::mu()), Just(UniformMorphism::psi())]
}

proptest! {
    #[test]
    fn exponent_at_least_one(w in word(3, 20)) {
        prop_assert!(exponent(&w).unwrap() >= Rational::integer(1));
    }

    #[test]
    fn power_exponent_at_least_n(x in word(3, 6), n in 1usize..5) {
        let s: Vec<Symbol> = x.symbols().repeat(n);
        let xn = Word::new(s, x.alphabet_size()).unwrap();
        prop_assert!(exponent(&xn).unwrap() >= Rational::integer(n as u64));
    }

    #[test]
    fn period_divides_into_exponent(w in word(3, 20)) {
        let p = shortest_period(&w).unwrap();
        prop_assert_eq!(exponent(&w).unwrap(), Rational::from_lengths(w.len(), p));
    }

    #[test]
    fn ordinary_below_circular(w in word(3, 16)) {
        let (ce, _) = critical_exponent(&w).unwrap();
        let (cce, _) = circular_critical_exponent(&w).unwrap();
        prop_assert!(ce <= cce);
    }

    #[test]
    fn factors_never_raise_exponents(w in word(3, 16), a in 0usize..16, b in 0usize..16) {
        let (lo, hi) = (a.min(b) % w.len(), (a.max(b) % w.len()) + 1);
        prop_assume!(lo < hi);
        let f = w.factor(lo, hi);
        prop_assert!(critical_exponent(&f).unwrap().0 <= critical_exponent(&w).unwrap().0);
        prop_assert!(circular_critical_exponent(&f).unwrap().0 <= circular_critical_exponent(&w).unwrap().0);
    }

    #[test]
    fn witnesses_replay(w in word(3, 16)) {
        let (e, wit) = critical_exponent(&w).unwrap();
        prop_assert!(wit.replay(&w));
        prop_assert_eq!(wit.exponent, e);
        let (e, wit) = circular_critical_exponent(&w).unwrap();
        prop_assert!(wit.replay(&w));
        prop_assert_eq!(wit.exponent, e);
    }

    #[test]
    fn failing_verdicts_replay(w in word(3, 14), num in 1u64..8, den in 1u64..4, strict: bool) {
        prop_assume!(num >= den);
        let th = PowerThreshold::new(Rational::new(num, den), strict).unwrap();
        for v in [is_power_free(&w, &th), is_circularly_power_free(&w, &th)] {
            if let Some(wit) = v.witness() {
                prop_assert!(wit.replay(&w));
                prop_assert!(th.violated_by(wit.exponent));
            }
        }
    }

    #[test]
    fn conjugates_stay_below_circular_exponent(w in word(3, 14), r in 0usize..14) {
        let rot = w.rotate(r % w.len());
        prop_assert!(critical_exponent(&rot).unwrap().0 <= circular_critical_exponent(&w).unwrap().0);
    }

    #[test]
    fn images_scale_lengths(h in builtin(), s in prop::collection::vec(0u8..2, 0..30)) {
        let w = Word::new(s, 2).unwrap();
        let w = w.with_alphabet(h.source_alphabet_size).unwrap();
        prop_assert_eq!(h.apply(&w).unwrap().len(), h.q * w.len());
    }

    #[test]
    fn fixed_point_prefixes_nest(h in endomorphism(), n in 1usize..300, m in 1usize..300) {
        let (n, m) = (n.min(m), n.max(m));
        let short = h.fixed_point_prefix(0, n).unwrap();
        let long = h.fixed_point_prefix(0, m).unwrap();
        prop_assert_eq!(short.symbols(), &long.symbols()[..n]);
        let image = h.apply(&short).unwrap();
        prop_assert!(image.symbols().starts_with(short.symbols()));
    }

    #[test]
    fn synchronized_power_prefixes(h in synchronizing(), s in prop::collection::vec(0u8..6, 1..12), n in 2usize..5) {
        prop_assert!(h.is_synchronizing());
        let k = h.source_alphabet_size;
        let w = Word::new(s.into_iter().map(|c| c % k).collect(), k).unwrap();
        prop_assert!(h.check_technical_lemma(&w, n).unwrap());
    }

    #[test]
    fn product_exponent_monotone(w in word(2, 12), i in 1usize..3, cap in 3usize..12) {
        let index = FactorIndex::from_word(&w);
        let base = product_exponent(&index, i, cap).unwrap().exponent;
        prop_assert!(base <= product_exponent(&index, i + 1, cap).unwrap().exponent);
        prop_assert!(base <= product_exponent(&index, i, cap + 3).unwrap().exponent);
    }

    #[test]
    fn binary_squarefree_words_have_small_circular_exponent(s in prop::collection::vec(0u8..2, 1..=12)) {
        let w = Word::new(s, 2).unwrap();
        if critical_exponent(&w).unwrap().0 <= Rational::integer(2) {
            prop_assert!(circular_critical_exponent(&w).unwrap().0 <= Rational::integer(4));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn relaxing_threshold_never_shortens(k in 2u8..=3, num in 3u64..10, strict: bool, circular: bool) {
        let base = Rational::new(num, 2);
        let cfg = |v: Rational, strict: bool| SearchConfig::new(k, PowerThreshold::new(v, strict).unwrap(), circular)
            .with_max_length(40);
        let r0 = longest_word(&cfg(base, strict)).unwrap();
        let r1 = longest_word(&cfg(Rational::new(num + 1, 2), strict)).unwrap();
        let r2 = longest_word(&cfg(base, true)).unwrap();
        prop_assert!(r0.longest_length <= r1.longest_length);
        prop_assert!(r0.longest_length <= r2.longest_length);
        let th = PowerThreshold::new(base, strict).unwrap();
        let v = if circular { is_circularly_power_free(&r0.witness, &th) } else { is_power_free(&r0.witness, &th) };
        prop_assert!(v.is_pass());
    }
}
