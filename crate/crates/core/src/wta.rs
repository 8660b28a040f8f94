//! Local winner-take-all machinery.
//!
//! * [`cluster_wta`]: keep the indices attaining the maximum score.
//! * [`SoftMLDecoder`]: a bipartite neural decoder over an arbitrary codebook
//!   in `{−1,+1}^κ` that outputs the consensus of all maximum-correlation
//!   codewords, erasing positions on which they disagree.
//! * [`max2`], [`max_tree`] and [`MaxSelectorCircuit`]: the maximum selector
//!   built from the identity `max(x,y) = (x+y)/2 + |x−y|/2`.

use std::fmt;

use crate::error::{Error, Result};

/// Indices attaining the maximum of `scores`, or nothing if that maximum is
/// below `sigma`. Ties are all kept.
pub fn cluster_wta(scores: &[i64], sigma: i64) -> Vec<usize> {
    let Some(&max) = scores.iter().max() else {
        return Vec::new();
    };
    if max < sigma {
        return Vec::new();
    }
    scores
        .iter()
        .enumerate()
        .filter(|&(_, &s)| s == max)
        .map(|(i, _)| i)
        .collect()
}

/// A set of distinct admissible words in `{−1,+1}^κ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    kappa: usize,
    words: Vec<Vec<i8>>,
}

impl Codebook {
    pub fn new(words: Vec<Vec<i8>>) -> Result<Self> {
        let Some(first) = words.first() else {
            return Err(Error::Range("codebook must not be empty".into()));
        };
        let kappa = first.len();
        if kappa == 0 {
            return Err(Error::Range("codewords must not be empty".into()));
        }
        for (j, w) in words.iter().enumerate() {
            if w.len() != kappa {
                return Err(Error::size(kappa, w.len()));
            }
            if w.iter().any(|&s| s != 1 && s != -1) {
                return Err(Error::Range(format!("codeword {j} has a symbol outside {{-1,+1}}")));
            }
            if words[..j].contains(w) {
                return Err(Error::Range(format!("codeword {j} is a duplicate")));
            }
        }
        Ok(Self { kappa, words })
    }

    /// Parses `+`/`-` strings, one codeword per line. Blank lines and `#`
    /// comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut words = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let word = line
                .chars()
                .map(|c| match c {
                    '+' => Ok(1i8),
                    '-' => Ok(-1i8),
                    other => Err(Error::parse(i + 1, format!("invalid codeword symbol {other:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            words.push(word);
        }
        Self::new(words)
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn words(&self) -> &[Vec<i8>] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Output symbol of the soft decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SoftSymbol {
    Minus,
    Plus,
    Erased,
}

impl SoftSymbol {
    pub fn as_char(self) -> char {
        match self {
            SoftSymbol::Minus => '-',
            SoftSymbol::Plus => '+',
            SoftSymbol::Erased => 'X',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoftOutput {
    pub symbols: Vec<SoftSymbol>,
    /// Codebook indices attaining `v_max` (empty when below the threshold).
    pub winners: Vec<usize>,
    pub v_max: i64,
}

impl fmt::Display for SoftOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

/// Complete bipartite graph between `κ` input neurons and one fanal per
/// codeword, with weight `g[j][i] = (a_j)_i`.
#[derive(Debug, Clone)]
pub struct SoftMLDecoder {
    codebook: Codebook,
    weights: Vec<Vec<i8>>,
}

impl SoftMLDecoder {
    pub fn new(codebook: Codebook) -> Self {
        let weights = codebook.words().to_vec();
        Self { codebook, weights }
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    /// Weight between input neuron `i` and the fanal of codeword `j`.
    pub fn weight(&self, i: usize, j: usize) -> i8 {
        self.weights[j][i]
    }

    /// Decodes an input in `{−1, 0, +1}^κ`, where 0 marks an erased symbol.
    ///
    /// Each fanal sums its weighted inputs; the fanals reaching the maximum
    /// (if it is at least `sigma`) switch on and feed back to the inputs. An
    /// output neuron reads `+` when the feedback equals the number of
    /// winners, `−` when it equals its negation, and is erased otherwise, so
    /// a position survives only where all winners agree.
    pub fn decode(&self, input: &[i8], sigma: i64) -> Result<SoftOutput> {
        let kappa = self.codebook.kappa();
        if input.len() != kappa {
            return Err(Error::size(kappa, input.len()));
        }
        if input.iter().any(|v| !(-1..=1).contains(v)) {
            return Err(Error::Range("input symbols must be -1, 0 or +1".into()));
        }
        let fanal_scores: Vec<i64> = self
            .weights
            .iter()
            .map(|g| g.iter().zip(input).map(|(&w, &v)| i64::from(w * v)).sum())
            .collect();
        let v_max = *fanal_scores.iter().max().unwrap();
        let winners = cluster_wta(&fanal_scores, sigma);

        let unanimous = winners.len() as i64;
        let symbols = (0..kappa)
            .map(|i| {
                let feedback: i64 = winners.iter().map(|&j| i64::from(self.weights[j][i])).sum();
                match feedback {
                    0 => SoftSymbol::Erased,
                    f if f == unanimous => SoftSymbol::Plus,
                    f if f == -unanimous => SoftSymbol::Minus,
                    _ => SoftSymbol::Erased,
                }
            })
            .collect();
        Ok(SoftOutput {
            symbols,
            winners,
            v_max,
        })
    }
}

/// Free-function form of [`SoftMLDecoder::decode`].
pub fn soft_ml_decode(decoder: &SoftMLDecoder, input: &[i8], sigma: i64) -> Result<SoftOutput> {
    decoder.decode(input, sigma)
}

/// Parses a decoder input over `+`, `-` and `0`/`x`/`?` (erased).
pub fn parse_soft_input(s: &str) -> Result<Vec<i8>> {
    s.trim()
        .chars()
        .map(|c| match c {
            '+' => Ok(1),
            '-' => Ok(-1),
            '0' | 'x' | 'X' | '?' => Ok(0),
            other => Err(Error::Format(format!("invalid input symbol {other:?}"))),
        })
        .collect()
}

/// `max(x, y)` through `(x+y)/2 + |x−y|/2`.
///
/// Exact whenever `x+y` and `x−y` are representable, e.g. integers or dyadic
/// rationals of moderate size.
#[inline]
pub fn max2(x: f64, y: f64) -> f64 {
    (x + y) / 2.0 + (x - y).abs() / 2.0
}

/// Maximum of `2^q` values via a balanced cascade of [`max2`] nodes.
///
/// Fails if the length is not a power of two or if every value is negative
/// (the neural cascade needs at least one nonnegative input).
pub fn max_tree(values: &[f64]) -> Result<f64> {
    check_selector_input(values)?;
    let mut level = values.to_vec();
    while level.len() > 1 {
        level = level.chunks(2).map(|p| max2(p[0], p[1])).collect();
    }
    Ok(level[0])
}

fn check_selector_input(values: &[f64]) -> Result<()> {
    if values.is_empty() || !values.len().is_power_of_two() {
        return Err(Error::size(values.len().next_power_of_two().max(1), values.len()));
    }
    if !values.iter().any(|&v| v >= 0.0) {
        return Err(Error::Precondition(
            "max selector needs at least one nonnegative input".into(),
        ));
    }
    Ok(())
}

/// A neuron that sums weighted inputs and keeps the sum only if it is positive.
#[derive(Debug, Clone)]
struct Neuron {
    inputs: Vec<(usize, f64)>,
}

/// Explicit neural max-selector over `2^q` inputs.
///
/// Every `max2` node is three rectifying neurons:
/// `h1 = [x/2 − y/2]⁺`, `h2 = [y/2 − x/2]⁺`, `out = [x/2 + y/2 + h1 + h2]⁺`.
/// Nodes are arranged in a balanced tree of depth `q`. Because each output
/// neuron rectifies, the circuit returns `max(0, max(values))`, which is the
/// true maximum when at least one input is nonnegative.
#[derive(Debug, Clone)]
pub struct MaxSelectorCircuit {
    inputs: usize,
    neurons: Vec<Neuron>,
}

impl MaxSelectorCircuit {
    /// Builds the circuit for `2^depth` inputs.
    pub fn new(depth: u32) -> Self {
        let inputs = 1usize << depth;
        let mut neurons = Vec::new();
        // Signal ids: 0..inputs are input neurons, then every created neuron.
        let mut level: Vec<usize> = (0..inputs).collect();
        let mut next_id = inputs;
        while level.len() > 1 {
            let mut up = Vec::with_capacity(level.len() / 2);
            for pair in level.chunks(2) {
                let (x, y) = (pair[0], pair[1]);
                let h1 = next_id;
                neurons.push(Neuron {
                    inputs: vec![(x, 0.5), (y, -0.5)],
                });
                let h2 = next_id + 1;
                neurons.push(Neuron {
                    inputs: vec![(y, 0.5), (x, -0.5)],
                });
                neurons.push(Neuron {
                    inputs: vec![(x, 0.5), (y, 0.5), (h1, 1.0), (h2, 1.0)],
                });
                up.push(next_id + 2);
                next_id += 3;
            }
            level = up;
        }
        Self { inputs, neurons }
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    /// Number of neurons beyond the inputs: `3·(2^q − 1)`.
    pub fn neuron_count(&self) -> usize {
        self.neurons.len()
    }

    pub fn evaluate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.inputs {
            return Err(Error::size(self.inputs, values.len()));
        }
        check_selector_input(values)?;
        let mut signal = values.to_vec();
        signal.reserve(self.neurons.len());
        for neuron in &self.neurons {
            let sum = neuron
                .inputs
                .iter()
                .fold(0.0, |acc, &(src, w)| acc + w * signal[src]);
            signal.push(if sum > 0.0 { sum } else { 0.0 });
        }
        Ok(*signal.last().unwrap())
    }
}

/// Evaluates [`MaxSelectorCircuit`] on `values`.
pub fn max_tree_circuit(values: &[f64]) -> Result<f64> {
    check_selector_input(values)?;
    MaxSelectorCircuit::new(values.len().trailing_zeros()).evaluate(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn six_word_codebook() -> Codebook {
        Codebook::parse("+++-\n--++\n-+-+\n----\n-++-\n+-+-\n").unwrap()
    }

    #[test]
    fn cluster_wta_examples() {
        assert_eq!(cluster_wta(&[3, 1, 3, 0], 0), vec![0, 2]);
        assert!(cluster_wta(&[2, 1], 3).is_empty());
        assert!(cluster_wta(&[], 0).is_empty());
        assert_eq!(cluster_wta(&[-5, -2, -2], -3), vec![1, 2]);
    }

    #[test]
    fn six_word_noiseless_input() {
        let dec = SoftMLDecoder::new(six_word_codebook());
        let out = dec.decode(&[1, 1, 1, -1], 0).unwrap();
        assert_eq!(out.winners, vec![0]);
        assert_eq!(out.v_max, 4);
        assert_eq!(out.to_string(), "+++-");
        assert_eq!(dec.weight(3, 0), -1);
        assert_eq!(dec.weight(0, 1), -1);
    }

    #[test]
    fn six_word_scores_hand_evaluated() {
        let dec = SoftMLDecoder::new(six_word_codebook());
        let input = [1i8, 1, 1, -1];
        let expected = [4i64, -2, -2, -2, 2, 2];
        for (j, w) in dec.codebook().words().iter().enumerate() {
            let s: i64 = w.iter().zip(&input).map(|(&a, &b)| i64::from(a * b)).sum();
            assert_eq!(s, expected[j]);
        }
    }

    #[test]
    fn disagreeing_winners_erase() {
        // 001 and 011 in ±1 form, input erases the middle symbol
        let cb = Codebook::new(vec![vec![-1, -1, 1], vec![-1, 1, 1]]).unwrap();
        let out = SoftMLDecoder::new(cb).decode(&[-1, 0, 1], 0).unwrap();
        assert_eq!(out.winners, vec![0, 1]);
        assert_eq!(
            out.symbols,
            vec![SoftSymbol::Minus, SoftSymbol::Erased, SoftSymbol::Plus]
        );
        assert_eq!(out.to_string(), "-X+");
    }

    #[test]
    fn majority_of_winners_is_not_enough() {
        // all three words score 1 on the input `00+`; two say `+` at position 0, one says `-`
        let cb = Codebook::new(vec![vec![1, 1, 1], vec![1, -1, 1], vec![-1, 1, 1]]).unwrap();
        let out = SoftMLDecoder::new(cb).decode(&[0, 0, 1], 0).unwrap();
        assert_eq!(out.winners, vec![0, 1, 2]);
        assert_eq!(out.to_string(), "XX+");
    }

    #[test]
    fn below_threshold_erases_everything() {
        let dec = SoftMLDecoder::new(six_word_codebook());
        let out = dec.decode(&[1, 1, 1, -1], 5).unwrap();
        assert!(out.winners.is_empty());
        assert_eq!(out.v_max, 4);
        assert!(out.symbols.iter().all(|&s| s == SoftSymbol::Erased));
    }

    #[test]
    fn complete_code_is_identity() {
        let kappa = 4;
        let words: Vec<Vec<i8>> = (0..1u32 << kappa)
            .map(|x| (0..kappa).map(|i| if x >> i & 1 == 1 { 1 } else { -1 }).collect())
            .collect();
        let dec = SoftMLDecoder::new(Codebook::new(words.clone()).unwrap());
        for w in &words {
            let out = dec.decode(w, 0).unwrap();
            assert_eq!(out.winners.len(), 1);
            assert_eq!(&dec.codebook().words()[out.winners[0]], w);
        }
    }

    #[test]
    fn codebook_validation() {
        assert!(Codebook::new(vec![]).is_err());
        assert!(Codebook::new(vec![vec![1, -1], vec![1]]).is_err());
        assert!(Codebook::new(vec![vec![1, 0]]).is_err());
        assert!(Codebook::new(vec![vec![1, -1], vec![1, -1]]).is_err());
        assert!(matches!(
            Codebook::parse("++\n+*\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        let dec = SoftMLDecoder::new(six_word_codebook());
        assert!(dec.decode(&[1, 1, 1], 0).is_err());
        assert!(dec.decode(&[1, 1, 1, 2], 0).is_err());
    }

    #[test]
    fn max2_examples() {
        assert_eq!(max2(3.0, 5.0), 5.0);
        assert_eq!(max2(-2.0, 7.0), 7.0);
        for x in [-3.5, 0.0, 1.25, 1e6] {
            assert_eq!(max2(x, x), x);
        }
    }

    #[test]
    fn max_tree_examples() {
        assert_eq!(max_tree(&[0.0, 0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(max_tree(&[1.0, 4.0, 2.0, 0.0]).unwrap(), 4.0);
        assert_eq!(max_tree(&[7.0]).unwrap(), 7.0);
        assert!(matches!(max_tree(&[1.0, 2.0, 3.0]), Err(Error::Size { .. })));
        assert!(matches!(max_tree(&[-1.0, -2.0]), Err(Error::Precondition(_))));
        assert!(max_tree(&[]).is_err());
    }

    #[test]
    fn circuit_shape_and_values() {
        let c = MaxSelectorCircuit::new(2);
        assert_eq!(c.inputs(), 4);
        assert_eq!(c.neuron_count(), 9);
        assert_eq!(c.evaluate(&[1.0, 4.0, 2.0, 0.0]).unwrap(), 4.0);
        assert_eq!(c.evaluate(&[-3.0, -1.0, 0.5, -7.0]).unwrap(), 0.5);
        assert!(c.evaluate(&[-3.0, -1.0, -0.5, -7.0]).is_err());
        assert!(c.evaluate(&[1.0, 2.0]).is_err());
    }
}
