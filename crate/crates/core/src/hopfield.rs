//! Classical Hopfield network used as the comparison baseline.
//!
//! States are `±1` vectors. Learning is the Hebbian outer-product sum with a
//! zero diagonal; recall applies `v_i ← +1 if Σ_j w_ij v_j ≥ 0 else −1`
//! synchronously until a fixed point or an iteration cap.

use std::io::Write;

use crate::error::{Error, Result};

/// Default cap on synchronous recall iterations.
pub const DEFAULT_MAX_ITERS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopfieldNetwork {
    n: usize,
    weights: Vec<i32>,
    messages_learnt: usize,
}

/// Outcome of [`HopfieldNetwork::recall`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recall {
    pub state: Vec<i8>,
    pub iterations: usize,
    pub converged: bool,
}

impl HopfieldNetwork {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("need at least 2 neurons, got {n}")));
        }
        Ok(Self {
            n,
            weights: vec![0; n * n],
            messages_learnt: 0,
        })
    }

    pub fn neurons(&self) -> usize {
        self.n
    }

    pub fn messages_learnt(&self) -> usize {
        self.messages_learnt
    }

    pub fn weight(&self, i: usize, j: usize) -> i32 {
        self.weights[i * self.n + j]
    }

    fn check_state(&self, v: &[i8]) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::size(self.n, v.len()));
        }
        if v.iter().any(|&x| x != 1 && x != -1) {
            return Err(Error::Range("Hopfield states must be +1/-1".into()));
        }
        Ok(())
    }

    /// Adds `d_i·d_j` to every off-diagonal weight for each message.
    /// All messages are validated before any weight changes.
    pub fn learn<M: AsRef<[i8]>>(&mut self, messages: &[M]) -> Result<()> {
        for m in messages {
            self.check_state(m.as_ref())?;
        }
        let n = self.n;
        for m in messages {
            let d = m.as_ref();
            for i in 0..n {
                let row = &mut self.weights[i * n..(i + 1) * n];
                let di = i32::from(d[i]);
                for (w, &dj) in row.iter_mut().zip(d) {
                    *w += di * i32::from(dj);
                }
                row[i] = 0;
            }
            self.messages_learnt += 1;
        }
        Ok(())
    }

    /// Local field `Σ_j w_ij v_j` at every neuron.
    pub fn fields(&self, state: &[i8]) -> Result<Vec<i64>> {
        self.check_state(state)?;
        Ok(self
            .weights
            .chunks(self.n)
            .map(|row| row.iter().zip(state).map(|(&w, &v)| i64::from(w * i32::from(v))).sum())
            .collect())
    }

    /// One synchronous update; a zero field maps to `+1`.
    pub fn step(&self, state: &[i8]) -> Result<Vec<i8>> {
        Ok(self
            .fields(state)?
            .into_iter()
            .map(|h| if h >= 0 { 1 } else { -1 })
            .collect())
    }

    /// Iterates [`step`](Self::step) until the state stops changing or
    /// `max_iters` updates have been applied.
    pub fn recall(&self, state: &[i8], max_iters: usize) -> Result<Recall> {
        let mut current = state.to_vec();
        self.check_state(&current)?;
        for it in 1..=max_iters {
            let next = self.step(&current)?;
            if next == current {
                return Ok(Recall {
                    state: current,
                    iterations: it,
                    converged: true,
                });
            }
            current = next;
        }
        Ok(Recall {
            state: current,
            iterations: max_iters,
            converged: false,
        })
    }

    /// True if `message` is unchanged by one update.
    pub fn is_stable(&self, message: &[i8]) -> Result<bool> {
        Ok(self.step(message)? == message)
    }

    /// Writes the weight matrix as CSV, one row per neuron.
    pub fn write_weights_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        for row in self.weights.chunks(self.n) {
            wtr.write_record(row.iter().map(|x| x.to_string()))?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn check_n(n: f64) -> Result<()> {
    if n.is_nan() || n < 2.0 {
        return Err(Error::Domain(format!("n must be >= 2, got {n}")));
    }
    Ok(())
}

/// Diversity bound `n / (2 ln n)`.
pub fn hnn_diversity(n: f64) -> Result<f64> {
    check_n(n)?;
    Ok(n / (2.0 * n.ln()))
}

/// Capacity bound `n² / (2 ln n)` in bits.
pub fn hnn_capacity(n: f64) -> Result<f64> {
    check_n(n)?;
    Ok(n * n / (2.0 * n.ln()))
}

/// Memory needed by `n(n−1)/2` connections on `P` levels: `n(n−1)/2 · log2 P`.
pub fn hnn_memory_bits(n: f64, levels: f64) -> Result<f64> {
    check_n(n)?;
    if levels.is_nan() || levels < 2.0 {
        return Err(Error::Domain(format!("levels must be >= 2, got {levels}")));
    }
    Ok(n * (n - 1.0) / 2.0 * levels.log2())
}

/// Memory at the diversity bound, with `P = M_max + 1` levels.
pub fn hnn_max_memory_bits(n: f64) -> Result<f64> {
    hnn_memory_bits(n, hnn_diversity(n)? + 1.0)
}

/// Closed-form efficiency `n / ((n−1) ln n · log2(n/ln n + 1))`.
///
/// Closed form of the efficiency. Dividing [`hnn_capacity`] by
/// [`hnn_max_memory_bits`] gives `log2(n/(2 ln n) + 1)` in the last factor
/// instead, which is what [`hnn_capacity_ratio`] returns.
pub fn hnn_efficiency(n: f64) -> Result<f64> {
    check_n(n)?;
    let ln = n.ln();
    Ok(n / ((n - 1.0) * ln * (n / ln + 1.0).log2()))
}

/// `C_max / Q_max` evaluated directly.
pub fn hnn_capacity_ratio(n: f64) -> Result<f64> {
    Ok(hnn_capacity(n)? / hnn_max_memory_bits(n)?)
}
