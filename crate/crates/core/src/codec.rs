//! Exact codecs between words and numbers.
//!
//! Three codecs: nonzero rationals against the bound `|n|` (alternating
//! factorial places on the positive side, alternating reciprocal-factorial
//! places on the negative side), nonzero integers against a mixed-radix
//! base chain, and naturals against a fixed base. Decoding evaluates the
//! place-value sum exactly; encoding extracts digits from the innermost
//! place outward and is verified by decoding before returning.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domination::{BoundRule, DominationError, DominationVector, Kind};
use crate::word::{Letter, LocatedWord, Position, VariableWord, WordError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodecError {
    #[error("zero has no word representation")]
    ZeroInput,
    #[error("word does not fit this codec: {0}")]
    WrongDomination(String),
    #[error("natural codec base must be at least 2, got {0}")]
    BadBase(u64),
    #[error("mixed radix bases must all be at least 2")]
    BadRadix,
    #[error("expected a positive number, got {0}")]
    NotPositive(BigInt),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Domination(#[from] DominationError),
}

fn factorial(n: u32) -> BigInt {
    let mut out = BigInt::one();
    for i in 2..=n as u64 {
        out *= i;
    }
    out
}

fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

/// Signed place value of the positive-side position `r >= 1` in the
/// rational codec: `(−1)^{r+1} · r!`.
fn rational_place_pos(r: u32) -> BigInt {
    let f = factorial(r);
    if r % 2 == 1 {
        f
    } else {
        -f
    }
}

/// Signed place value of the negative-side position `−s` (`s >= 1`):
/// `(−1)^s / (s+1)!`.
fn rational_place_neg(s: u32) -> BigRational {
    let f = factorial(s + 1);
    let one = BigInt::one();
    if s % 2 == 0 {
        BigRational::new(one, f)
    } else {
        BigRational::new(-one, f)
    }
}

/// The bound vector of the rational codec: `|n|` on both sides.
pub fn rational_domination() -> DominationVector {
    DominationVector::two_sided(BoundRule::Abs).expect("abs rule is valid")
}

/// Evaluates the rational expansion of a two-sided word whose digits are
/// bounded by `|n|`. The result is exact and never zero.
pub fn decode_rational(w: &LocatedWord) -> Result<BigRational, CodecError> {
    w.check_bounds(&rational_domination())
        .map_err(|e| CodecError::WrongDomination(e.to_string()))?;
    let mut total = BigRational::zero();
    for (&p, &v) in w.entries() {
        let digit = BigInt::from(v);
        if p > 0 {
            total += BigRational::from(digit * rational_place_pos(p as u32));
        } else {
            total += rational_place_neg((-p) as u32) * BigRational::from(digit);
        }
    }
    debug_assert!(!total.is_zero());
    Ok(total)
}

/// Builds the unique word decoding to `q`.
///
/// The denominator fixes the deepest negative-side place; digits come out
/// innermost-first by residues against successive place ratios, and the
/// leftover integer feeds the positive side the same way. The result is
/// decode-verified.
pub fn encode_rational(q: &BigRational) -> Result<LocatedWord, CodecError> {
    if q.is_zero() {
        return Err(CodecError::ZeroInput);
    }
    // Smallest s with denom | (s+1)!; the expansion uses no deeper place.
    let denom = q.denom().clone();
    let mut s_max = 1u32;
    let mut fact = factorial(2);
    while (&fact % &denom) != BigInt::zero() {
        s_max += 1;
        fact *= big(s_max as u64 + 1);
        debug_assert!(s_max < 10_000, "denominator has no factorial multiple in range");
    }
    // m = q · (s_max+1)!, an integer; peel digits from s_max down to 1.
    let mut m = (q * BigRational::from(fact)).to_integer();
    let mut entries: Vec<(Position, Letter)> = Vec::new();
    for s in (1..=s_max).rev() {
        let modulus = big(s as u64 + 1);
        // digit = ((−1)^s · m) mod (s+1), in 0..=s
        let signed = if s % 2 == 0 { m.clone() } else { -m.clone() };
        let digit = ((signed % &modulus) + &modulus) % &modulus;
        let digit_u = u64::try_from(&digit).expect("digit fits");
        if digit_u > 0 {
            entries.push((-(s as i32), digit_u));
        }
        let contribution = if s % 2 == 0 { digit.clone() } else { -digit.clone() };
        m = (m - contribution) / modulus;
    }
    // m now carries the positive side.
    let mut r = 1u32;
    while !m.is_zero() {
        let modulus = big(r as u64 + 1);
        // digit = ((−1)^{r+1} · m) mod (r+1), in 0..=r
        let signed = if r % 2 == 1 { m.clone() } else { -m.clone() };
        let digit = ((signed % &modulus) + &modulus) % &modulus;
        let digit_u = u64::try_from(&digit).expect("digit fits");
        if digit_u > 0 {
            entries.push((r as i32, digit_u));
        }
        let contribution = if r % 2 == 1 { digit.clone() } else { -digit.clone() };
        m = (m - contribution) / modulus;
        r += 1;
        debug_assert!(r < 10_000, "integer part failed to terminate");
    }
    let word = LocatedWord::new(Kind::TwoSided, entries)?;
    debug_assert_eq!(&decode_rational(&word).unwrap(), q);
    Ok(word)
}

/// A chain of radix bases `k_s >= 2` with cumulative places
/// `l_0 = 1, l_s = k_1···k_s`.
///
/// Words carry digits `1..=k_s` at position `s`; the canonical digits the
/// encoder emits stay below `k_s`, which is where decoding is injective.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "DominationVector", into = "DominationVector")]
pub struct MixedRadix {
    bases: DominationVector,
}

impl TryFrom<DominationVector> for MixedRadix {
    type Error = CodecError;
    fn try_from(bases: DominationVector) -> Result<Self, CodecError> {
        MixedRadix::new(bases)
    }
}

impl From<MixedRadix> for DominationVector {
    fn from(r: MixedRadix) -> DominationVector {
        r.bases
    }
}

impl MixedRadix {
    pub fn new(bases: DominationVector) -> Result<Self, CodecError> {
        if bases.kind() != Kind::OneSided {
            return Err(CodecError::WrongDomination("radix bases are one-sided".into()));
        }
        // Nondecreasing is already enforced; >= 2 needs the first value only.
        if bases.bound(1)? < 2 {
            return Err(CodecError::BadRadix);
        }
        Ok(MixedRadix { bases })
    }

    /// The factorial chain `k = (2, 3, 4, …)`.
    pub fn factorial() -> Self {
        MixedRadix::new(DominationVector::one_sided(BoundRule::AbsPlusOne).unwrap()).unwrap()
    }

    /// Constant bases `k = (c, c, c, …)`.
    pub fn constant(c: u64) -> Result<Self, CodecError> {
        MixedRadix::new(DominationVector::one_sided(BoundRule::Constant(c))?)
    }

    pub fn bases(&self) -> &DominationVector {
        &self.bases
    }

    pub fn base(&self, s: u32) -> Result<u64, CodecError> {
        Ok(self.bases.bound_at_index(s)?)
    }

    /// Place value `l_{s−1} = k_1···k_{s−1}` of position `s`.
    pub fn place(&self, s: u32) -> Result<BigInt, CodecError> {
        let mut out = BigInt::one();
        for t in 1..s {
            out *= big(self.base(t)?);
        }
        Ok(out)
    }

    /// Letter bound for words this codec accepts: the bases themselves.
    pub fn word_domination(&self) -> DominationVector {
        self.bases.clone()
    }

    /// Letter bound of the canonical digit family (`k_s − 1`), where
    /// decoding is injective and which encoding emits.
    pub fn canonical_domination(&self) -> Result<DominationVector, CodecError> {
        Ok(DominationVector::one_sided(self.bases.rule().decremented()?)?)
    }
}

/// Evaluates `Σ z_s (−1)^{s−1} l_{s−1}` over the recorded digits.
pub fn decode_integer(w: &LocatedWord, radix: &MixedRadix) -> Result<BigInt, CodecError> {
    w.check_bounds(&radix.word_domination())
        .map_err(|e| CodecError::WrongDomination(e.to_string()))?;
    let mut total = BigInt::zero();
    for (&p, &v) in w.entries() {
        let s = p as u32;
        let term = big(v) * radix.place(s)?;
        if s % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(total)
}

/// Builds the canonical word decoding to `z != 0`: digits below the bases,
/// extracted innermost-first. Decode-verified.
pub fn encode_integer(z: &BigInt, radix: &MixedRadix) -> Result<LocatedWord, CodecError> {
    if z.is_zero() {
        return Err(CodecError::ZeroInput);
    }
    let mut rest = z.clone();
    let mut entries: Vec<(Position, Letter)> = Vec::new();
    let mut s = 1u32;
    while !rest.is_zero() {
        let modulus = big(radix.base(s)?);
        // digit = ((−1)^{s−1} · rest) mod k_s, in 0..k_s
        let signed = if s % 2 == 1 { rest.clone() } else { -rest.clone() };
        let digit = ((signed % &modulus) + &modulus) % &modulus;
        let digit_u = u64::try_from(&digit).expect("digit fits");
        if digit_u > 0 {
            entries.push((s as i32, digit_u));
        }
        let contribution = if s % 2 == 1 { digit.clone() } else { -digit.clone() };
        rest = (rest - contribution) / modulus;
        s += 1;
        debug_assert!(s < 100_000, "digit extraction failed to terminate");
    }
    let word = LocatedWord::new(Kind::OneSided, entries)?;
    debug_assert_eq!(&decode_integer(&word, radix).unwrap(), z);
    Ok(word)
}

/// Positional base-`k` value of a one-sided word with digits below `k`.
pub fn decode_natural(w: &LocatedWord, base: u64) -> Result<BigInt, CodecError> {
    if base < 2 {
        return Err(CodecError::BadBase(base));
    }
    let dom = DominationVector::one_sided(BoundRule::Constant(base - 1))?;
    w.check_bounds(&dom)
        .map_err(|e| CodecError::WrongDomination(e.to_string()))?;
    let mut total = BigInt::zero();
    for (&p, &v) in w.entries() {
        total += big(v) * big(base).pow(p as u32 - 1);
    }
    Ok(total)
}

/// Base-`k` digits of `n >= 1`, nonzero digits only.
pub fn encode_natural(n: &BigInt, base: u64) -> Result<LocatedWord, CodecError> {
    if base < 2 {
        return Err(CodecError::BadBase(base));
    }
    if n.is_zero() {
        return Err(CodecError::ZeroInput);
    }
    if n.is_negative() {
        return Err(CodecError::NotPositive(n.clone()));
    }
    let modulus = big(base);
    let mut rest = n.clone();
    let mut entries: Vec<(Position, Letter)> = Vec::new();
    let mut s = 1i32;
    while !rest.is_zero() {
        let digit = &rest % &modulus;
        let digit_u = u64::try_from(&digit).expect("digit fits");
        if digit_u > 0 {
            entries.push((s, digit_u));
        }
        rest = (rest - digit) / &modulus;
        s += 1;
    }
    let word = LocatedWord::new(Kind::OneSided, entries)?;
    debug_assert_eq!(&decode_natural(&word, base).unwrap(), n);
    Ok(word)
}

/// A codec choice, as configs name them.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "codec", rename_all = "kebab-case")]
pub enum Codec {
    Rational,
    Integer { radix: MixedRadix },
    Natural { base: u64 },
}

impl Codec {
    pub fn factorial_integer() -> Self {
        Codec::Integer { radix: MixedRadix::factorial() }
    }

    pub fn kind(&self) -> Kind {
        match self {
            Codec::Rational => Kind::TwoSided,
            _ => Kind::OneSided,
        }
    }

    /// Bound vector for words this codec decodes.
    pub fn word_domination(&self) -> Result<DominationVector, CodecError> {
        match self {
            Codec::Rational => Ok(rational_domination()),
            Codec::Integer { radix } => Ok(radix.word_domination()),
            Codec::Natural { base } => {
                if *base < 2 {
                    return Err(CodecError::BadBase(*base));
                }
                Ok(DominationVector::one_sided(BoundRule::Constant(base - 1))?)
            }
        }
    }

    pub fn decode(&self, w: &LocatedWord) -> Result<BigRational, CodecError> {
        match self {
            Codec::Rational => decode_rational(w),
            Codec::Integer { radix } => Ok(BigRational::from(decode_integer(w, radix)?)),
            Codec::Natural { base } => Ok(BigRational::from(decode_natural(w, *base)?)),
        }
    }

    pub fn encode(&self, q: &BigRational) -> Result<LocatedWord, CodecError> {
        match self {
            Codec::Rational => encode_rational(q),
            Codec::Integer { radix } => {
                if !q.is_integer() {
                    return Err(CodecError::WrongDomination(format!(
                        "integer codec cannot encode {q}"
                    )));
                }
                encode_integer(&q.to_integer(), radix)
            }
            Codec::Natural { base } => {
                if !q.is_integer() {
                    return Err(CodecError::WrongDomination(format!(
                        "natural codec cannot encode {q}"
                    )));
                }
                encode_natural(&q.to_integer(), *base)
            }
        }
    }
}

/// The affine value family of a variable word under a codec:
/// `value(i, j) = constant + i·pos_coeff + j·neg_coeff`, matching
/// decode-after-substitute pointwise (`i` fills the positive side,
/// `j` the negative side).
#[derive(Clone, PartialEq, Debug)]
pub struct VariableNumber {
    pub constant: BigRational,
    pub pos_coeff: BigRational,
    pub neg_coeff: Option<BigRational>,
}

impl VariableNumber {
    pub fn value(&self, i: u64, j: u64) -> BigRational {
        let mut out = self.constant.clone() + &self.pos_coeff * BigRational::from(big(i));
        if let Some(nc) = &self.neg_coeff {
            out += nc * BigRational::from(big(j));
        }
        out
    }

    pub fn value_single(&self, i: u64) -> BigRational {
        debug_assert!(self.neg_coeff.is_none());
        self.value(i, 0)
    }
}

/// Precomputes the affine evaluation of a variable word under a codec.
pub fn lift_variable(vw: &VariableWord, codec: &Codec) -> Result<VariableNumber, CodecError> {
    vw.check_bounds(&codec.word_domination()?)
        .map_err(|e| CodecError::WrongDomination(e.to_string()))?;
    if vw.kind() != codec.kind() {
        return Err(CodecError::WrongDomination(format!(
            "codec expects {} words",
            codec.kind()
        )));
    }
    let mut constant = BigRational::zero();
    let mut pos_coeff = BigRational::zero();
    let mut neg_coeff = BigRational::zero();
    for (&p, &sym) in vw.entries() {
        let place: BigRational = match codec {
            Codec::Rational => {
                if p > 0 {
                    BigRational::from(rational_place_pos(p as u32))
                } else {
                    rational_place_neg((-p) as u32)
                }
            }
            Codec::Integer { radix } => {
                let s = p as u32;
                let l = radix.place(s)?;
                BigRational::from(if s % 2 == 1 { l } else { -l })
            }
            Codec::Natural { base } => BigRational::from(big(*base).pow(p as u32 - 1)),
        };
        match sym {
            crate::word::Symbol::Letter(v) => constant += &place * BigRational::from(big(v)),
            crate::word::Symbol::Variable => {
                if p > 0 {
                    pos_coeff += place;
                } else {
                    neg_coeff += place;
                }
            }
        }
    }
    Ok(VariableNumber {
        constant,
        pos_coeff,
        neg_coeff: if codec.kind() == Kind::TwoSided { Some(neg_coeff) } else { None },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{Subst, Symbol};
    use num_traits::FromPrimitive;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn word2(entries: &[(Position, Letter)]) -> LocatedWord {
        LocatedWord::new(Kind::TwoSided, entries.iter().copied()).unwrap()
    }

    fn word1(entries: &[(Position, Letter)]) -> LocatedWord {
        LocatedWord::new(Kind::OneSided, entries.iter().copied()).unwrap()
    }

    #[test]
    fn rational_decode_examples() {
        assert_eq!(decode_rational(&word2(&[(1, 1)])).unwrap(), rat(1, 1));
        assert_eq!(decode_rational(&word2(&[(-1, 1)])).unwrap(), rat(-1, 2));
        assert_eq!(decode_rational(&word2(&[(1, 1), (2, 2)])).unwrap(), rat(-3, 1));
        assert_eq!(decode_rational(&word2(&[(-1, 1), (2, 1)])).unwrap(), rat(-5, 2));
    }

    #[test]
    fn rational_encode_examples() {
        assert_eq!(encode_rational(&rat(1, 1)).unwrap(), word2(&[(1, 1)]));
        assert_eq!(encode_rational(&rat(-1, 2)).unwrap(), word2(&[(-1, 1)]));
        assert_eq!(encode_rational(&rat(2, 1)).unwrap(), word2(&[(2, 2), (3, 1)]));
        assert_eq!(encode_rational(&BigRational::zero()), Err(CodecError::ZeroInput));
    }

    #[test]
    fn rational_encode_matches_brute_force_on_small_support() {
        // Oracle: enumerate every digit vector on positions ±1..±3 and
        // check the encoder reproduces it from its decoded value.
        for qm1 in 0..=1u64 {
            for qm2 in 0..=2u64 {
                for qm3 in 0..=3u64 {
                    for q1 in 0..=1u64 {
                        for q2 in 0..=2u64 {
                            for q3 in 0..=3u64 {
                                let mut entries = vec![];
                                for (p, v) in
                                    [(-3, qm3), (-2, qm2), (-1, qm1), (1, q1), (2, q2), (3, q3)]
                                {
                                    if v > 0 {
                                        entries.push((p, v));
                                    }
                                }
                                if entries.is_empty() {
                                    continue;
                                }
                                let w = word2(&entries);
                                let q = decode_rational(&w).unwrap();
                                assert!(!q.is_zero());
                                assert_eq!(encode_rational(&q).unwrap(), w);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn integer_codec_examples() {
        let radix = MixedRadix::factorial();
        assert_eq!(decode_integer(&word1(&[(1, 1)]), &radix).unwrap(), BigInt::from(1));
        assert_eq!(
            decode_integer(&word1(&[(1, 1), (2, 1)]), &radix).unwrap(),
            BigInt::from(-1)
        );
        assert_eq!(
            encode_integer(&BigInt::from(5), &radix).unwrap(),
            word1(&[(1, 1), (2, 1), (3, 1)])
        );
        assert_eq!(
            encode_integer(&BigInt::zero(), &radix),
            Err(CodecError::ZeroInput)
        );
    }

    #[test]
    fn integer_round_trip_range() {
        let radix = MixedRadix::factorial();
        for z in -800i64..=800 {
            if z == 0 {
                continue;
            }
            let z = BigInt::from(z);
            let w = encode_integer(&z, &radix).unwrap();
            assert_eq!(decode_integer(&w, &radix).unwrap(), z);
            // Canonical digits stay below the bases.
            w.check_bounds(&radix.canonical_domination().unwrap()).unwrap();
        }
    }

    #[test]
    fn decode_accepts_letters_up_to_the_base() {
        // Letters equal to the base are legal words for this codec even
        // though the encoder never emits them; the value may then repeat
        // or hit zero.
        let radix = MixedRadix::constant(2).unwrap();
        let w = word1(&[(1, 2), (2, 1)]);
        assert_eq!(decode_integer(&w, &radix).unwrap(), BigInt::zero());
        let u = word1(&[(1, 2), (2, 2)]);
        assert_eq!(decode_integer(&u, &radix).unwrap(), BigInt::from(-2));
    }

    #[test]
    fn natural_codec_examples() {
        assert_eq!(
            encode_natural(&BigInt::from(5), 2).unwrap(),
            word1(&[(1, 1), (3, 1)])
        );
        assert_eq!(decode_natural(&word1(&[(1, 1)]), 10).unwrap(), BigInt::one());
        for k in [2u64, 3, 10] {
            for n in 1..=2000i64 {
                let n = BigInt::from(n);
                let w = encode_natural(&n, k).unwrap();
                assert_eq!(decode_natural(&w, k).unwrap(), n);
            }
        }
    }

    #[test]
    fn lift_variable_matches_examples() {
        // {1: v} under the factorial integer codec: value(p) = p.
        let vw = VariableWord::new(Kind::OneSided, [(1, Symbol::Variable)]).unwrap();
        let lifted = lift_variable(&vw, &Codec::factorial_integer()).unwrap();
        for p in 1..=1u64 {
            assert_eq!(lifted.value_single(p), BigRational::from_i64(p as i64).unwrap());
        }

        // {−1: v, 1: v} under the rational codec: value(i, j) = i − j/2.
        let vw = VariableWord::new(
            Kind::TwoSided,
            [(-1, Symbol::Variable), (1, Symbol::Variable)],
        )
        .unwrap();
        let lifted = lift_variable(&vw, &Codec::Rational).unwrap();
        assert_eq!(lifted.value(1, 1), rat(1, 2));
        assert_eq!(lifted.value(1, 0), rat(1, 1));
        assert_eq!(lifted.constant, BigRational::zero());
        assert_eq!(lifted.pos_coeff, rat(1, 1));
        assert_eq!(lifted.neg_coeff, Some(rat(-1, 2)));
    }

    #[test]
    fn lift_variable_agrees_with_decode_after_substitute() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let dom = rational_domination();
        for _ in 0..100 {
            // Random two-sided variable word within ±5.
            let mut entries = std::collections::BTreeMap::new();
            for p in [-5i32, -4, -3, -2, -1, 1, 2, 3, 4, 5] {
                match rng.gen_range(0..3) {
                    0 => {}
                    1 => {
                        entries.insert(p, Symbol::Variable);
                    }
                    _ => {
                        let bound = dom.bound(p).unwrap();
                        entries.insert(p, Symbol::Letter(rng.gen_range(1..=bound)));
                    }
                }
            }
            entries.insert(-1, Symbol::Variable);
            entries.insert(1, Symbol::Variable);
            let vw = VariableWord::new(Kind::TwoSided, entries).unwrap();
            let lifted = lift_variable(&vw, &Codec::Rational).unwrap();
            let max_i = dom.bound(vw.min_positive_pos().unwrap()).unwrap();
            let max_j = dom.bound(vw.max_negative_pos().unwrap()).unwrap();
            for i in 1..=max_i {
                for j in 1..=max_j {
                    let sub = vw.substitute(Subst::Pair(i, j), &dom).unwrap();
                    let direct = decode_rational(sub.as_constant().unwrap()).unwrap();
                    assert_eq!(lifted.value(i, j), direct);
                }
            }
        }
    }

    #[test]
    fn additivity_over_disjoint_domains() {
        let a = word2(&[(1, 1)]);
        let b = word2(&[(-1, 1), (2, 1)]);
        let joined = crate::word::concat(&a.to_word(), &b.to_word()).unwrap();
        let sum = decode_rational(&a).unwrap() + decode_rational(&b).unwrap();
        assert_eq!(decode_rational(joined.as_constant().unwrap()).unwrap(), sum);
        assert_eq!(sum, rat(-3, 2));
    }

    #[test]
    fn codec_json_names() {
        let c = Codec::factorial_integer();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(
            s,
            r#"{"codec":"integer","radix":{"kind":"one-sided","rule":"abs-plus-one"}}"#
        );
        let back: Codec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert_eq!(
            serde_json::to_string(&Codec::Rational).unwrap(),
            r#"{"codec":"rational"}"#
        );
    }
}
