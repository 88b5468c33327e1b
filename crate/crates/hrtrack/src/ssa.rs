//! Singular spectrum analysis of the acceleration channels.
//!
//! Each channel is embedded into an L-by-K Hankel trajectory matrix,
//! decomposed by SVD, and the leading rank-one terms are diagonal-averaged
//! back into time series. Components are grouped when their dominant
//! frequencies coincide or sit in a small integer harmonic ratio, and the
//! grouped series that fall inside the analysis band are returned as
//! motion-artifact references, strongest first.

use crate::error::{Error, Result};
use crate::signal_model::TrackerConfig;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rustfft::{num_complex::Complex, FftPlanner};

/// FFT length used to estimate a component's dominant frequency.
const DOMFREQ_NFFT: usize = 8192;
/// Components within this many Hz of each other belong to one group.
const FREQ_TOL_HZ: f64 = 0.05;
/// Relative tolerance for frequency ratios near an integer harmonic.
const HARMONIC_TOL: f64 = 0.02;

/// One elementary (rank-one) SSA component.
#[derive(Debug, Clone)]
pub struct Component {
    pub series: Vec<f64>,
    pub sigma: f64,
}

fn check_embed(embed_len: usize, n: usize) -> Result<(usize, usize)> {
    if embed_len < 2 || embed_len + 1 > n {
        return Err(Error::BadEmbedLength {
            embed_len,
            signal_len: n,
        });
    }
    Ok((embed_len, n - embed_len + 1))
}

/// Default embedding length: half the signal.
pub fn default_embed_len(n: usize) -> usize {
    n / 2
}

/// Decompose a signal into its leading `d` rank-one SSA components.
/// Pass `d >= min(L, K)` to obtain the complete decomposition.
///
/// The singular triples come from a symmetric eigendecomposition of the
/// smaller Gram matrix of the trajectory matrix H. Each component is the
/// diagonal average of the rank-one term u (u^T H) — a formulation whose
/// sum over the complete basis reproduces H exactly, so the full
/// decomposition round-trips even through near-zero singular values.
pub fn decompose(x: &[f64], embed_len: usize, d: usize) -> Result<Vec<Component>> {
    let n = x.len();
    let (l, k) = check_embed(embed_len, n)?;
    // The trajectory matrix entry depends only on i + j, so both
    // orientations are the same Hankel matrix; put the shorter dimension
    // on the rows to keep the Gram matrix small.
    let (rows, cols) = (l.min(k), l.max(k));
    let traj = DMatrix::from_fn(rows, cols, |i, j| x[i + j]);
    let gram = &traj * traj.transpose();
    let eig = SymmetricEigen::new(gram);
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::DecompositionFailure(
            "eigendecomposition produced non-finite values".into(),
        ));
    }
    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let rank = rows.min(d);
    let mut comps = Vec::with_capacity(rank);
    for &r in order.iter().take(rank) {
        let u = eig.eigenvectors.column(r);
        let w: DVector<f64> = traj.tr_mul(&u); // u^T H, length `cols`
        let sigma = w.norm();
        if sigma < 1e-12 {
            break;
        }
        // Diagonal averaging of the rank-one term: out[i+j] averages the
        // anti-diagonal of u w^T (orientation does not matter).
        let mut out = vec![0.0; n];
        let mut cnt = vec![0u32; n];
        for i in 0..rows {
            let ui = u[i];
            for j in 0..cols {
                out[i + j] += ui * w[j];
                cnt[i + j] += 1;
            }
        }
        for (o, c) in out.iter_mut().zip(&cnt) {
            *o /= *c as f64;
        }
        comps.push(Component { series: out, sigma });
    }
    Ok(comps)
}

/// Sum a set of component series sample-wise.
pub fn reconstruct(components: &[Component], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for c in components {
        for (o, v) in out.iter_mut().zip(&c.series) {
            *o += v;
        }
    }
    out
}

/// Dominant frequency of a series via a zero-padded FFT.
pub fn dominant_frequency(x: &[f64], sample_rate_hz: f64) -> f64 {
    let nfft = DOMFREQ_NFFT.max(x.len().next_power_of_two());
    let mut buf: Vec<Complex<f64>> = x
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(nfft)
        .collect();
    FftPlanner::new().plan_fft_forward(nfft).process(&mut buf);
    let half = nfft / 2 + 1;
    let mut best = 0usize;
    let mut best_mag = -1.0;
    for (i, c) in buf[..half].iter().enumerate() {
        let m = c.norm_sqr();
        if m > best_mag {
            best_mag = m;
            best = i;
        }
    }
    best as f64 * sample_rate_hz / nfft as f64
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }
    fn union(&mut self, i: usize, j: usize) {
        let (ri, rj) = (self.find(i), self.find(j));
        self.0[ri] = rj;
    }
}

fn related(f1: f64, f2: f64) -> bool {
    if (f1 - f2).abs() <= FREQ_TOL_HZ {
        return true;
    }
    for m in [2.0, 3.0] {
        if f2 > 0.0 && (f1 / f2 - m).abs() <= HARMONIC_TOL {
            return true;
        }
        if f1 > 0.0 && (f2 / f1 - m).abs() <= HARMONIC_TOL {
            return true;
        }
    }
    false
}

/// A grouped reference candidate.
#[derive(Debug, Clone)]
pub struct Reference {
    pub series: Vec<f64>,
    pub energy: f64,
    pub freq_hz: f64,
}

/// Extract motion-artifact reference series from the three acceleration
/// channels of one analysis window. Channels are decomposed independently;
/// the pooled in-band groups are returned sorted by descending energy,
/// truncated to `cfg.n_refs`.
pub fn extract_references(
    accel: [&[f64]; 3],
    cfg: &TrackerConfig,
    sample_rate_hz: f64,
) -> Result<Vec<Reference>> {
    let mut groups: Vec<Reference> = Vec::new();
    for ch in accel {
        let embed = if cfg.ssa_embed_len == 0 {
            default_embed_len(ch.len())
        } else {
            cfg.ssa_embed_len
        };
        let comps = decompose(ch, embed, cfg.ssa_d)?;
        if comps.is_empty() {
            continue;
        }
        // Weak singular triples are noise; keeping them lets the grouping
        // below chain unrelated components into one broadband series.
        let sigma_max = comps[0].sigma;
        let kept: Vec<&Component> = comps
            .iter()
            .take_while(|c| c.sigma >= cfg.ssa_sigma_floor * sigma_max)
            .collect();
        let freqs: Vec<f64> = kept
            .iter()
            .map(|c| dominant_frequency(&c.series, sample_rate_hz))
            .collect();

        let n = kept.len();
        let mut uf = UnionFind::new(n);
        for i in 0..n {
            for j in i + 1..n {
                if related(freqs[i], freqs[j]) {
                    uf.union(i, j);
                }
            }
        }
        let mut members: std::collections::HashMap<usize, Vec<usize>> =
            std::collections::HashMap::new();
        for i in 0..n {
            members.entry(uf.find(i)).or_default().push(i);
        }
        for idxs in members.values() {
            let mut series = vec![0.0; ch.len()];
            for &i in idxs {
                for (o, v) in series.iter_mut().zip(&kept[i].series) {
                    *o += v;
                }
            }
            let freq = dominant_frequency(&series, sample_rate_hz);
            if freq >= cfg.band_low_hz && freq <= cfg.band_high_hz {
                let energy = series.iter().map(|v| v * v).sum();
                groups.push(Reference {
                    series,
                    energy,
                    freq_hz: freq,
                });
            }
        }
    }
    groups.sort_by(|a, b| b.energy.total_cmp(&a.energy));
    groups.truncate(cfg.n_refs);
    Ok(groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tone(freq: f64, amp: f64, fs: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| amp * (2.0 * std::f64::consts::PI * freq * i as f64 / fs).sin())
            .collect()
    }

    #[test]
    fn full_decomposition_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let x: Vec<f64> = (0..120).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let l = default_embed_len(x.len());
            let comps = decompose(&x, l, usize::MAX).unwrap();
            let back = reconstruct(&comps, x.len());
            let err: f64 = x
                .iter()
                .zip(&back)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-6, "round-trip error {err}");
        }
    }

    #[test]
    fn pure_sinusoid_captured_by_leading_pair() {
        let fs = 125.0;
        let x = tone(2.0, 1.0, fs, 500);
        let comps = decompose(&x, 250, usize::MAX).unwrap();
        let top2 = reconstruct(&comps[..2], x.len());
        let total: f64 = x.iter().map(|v| v * v).sum();
        let captured: f64 = top2.iter().map(|v| v * v).sum();
        assert!(
            captured / total >= 0.99,
            "leading pair energy fraction {}",
            captured / total
        );
    }

    #[test]
    fn bad_embedding_rejected() {
        assert!(matches!(
            decompose(&[1.0, 2.0, 3.0], 1, 10),
            Err(Error::BadEmbedLength { .. })
        ));
        assert!(matches!(
            decompose(&[1.0, 2.0, 3.0], 3, 10),
            Err(Error::BadEmbedLength { .. })
        ));
        assert!(decompose(&[1.0, 2.0, 3.0], 2, 10).is_ok());
    }

    #[test]
    fn dominant_frequency_of_tone() {
        let fs = 125.0;
        let f = dominant_frequency(&tone(2.5, 1.0, fs, 1000), fs);
        assert!((f - 2.5).abs() < 0.02, "got {f}");
    }

    #[test]
    fn references_recover_shared_tone() {
        let fs = 125.0;
        let n = 1000;
        let ax = tone(1.8, 1.0, fs, n);
        let ay = tone(1.8, 0.7, fs, n);
        let az = tone(1.8, 0.4, fs, n);
        let cfg = TrackerConfig::default();
        let refs = extract_references([&ax, &ay, &az], &cfg, fs).unwrap();
        assert!(!refs.is_empty());
        // Strongest reference comes from the strongest channel and sits at
        // the tone frequency.
        assert!((refs[0].freq_hz - 1.8).abs() < 0.1, "{}", refs[0].freq_hz);
        for w in refs.windows(2) {
            assert!(w[0].energy >= w[1].energy);
        }
        assert!(refs.len() <= cfg.n_refs);
    }

    #[test]
    fn out_of_band_tone_rejected() {
        let fs = 125.0;
        let n = 1000;
        // 0.1 Hz drift lies below the analysis band.
        let slow = tone(0.1, 1.0, fs, n);
        let cfg = TrackerConfig::default();
        let refs = extract_references([&slow, &slow, &slow], &cfg, fs).unwrap();
        assert!(
            refs.iter().all(|r| r.freq_hz >= cfg.band_low_hz),
            "sub-band reference leaked through"
        );
    }

    #[test]
    fn harmonics_grouped_together() {
        let fs = 125.0;
        let n = 1000;
        let x: Vec<f64> = tone(1.5, 1.0, fs, n)
            .iter()
            .zip(&tone(3.0, 0.8, fs, n))
            .map(|(a, b)| a + b)
            .collect();
        let zero = vec![0.0; n];
        let cfg = TrackerConfig::default();
        let refs = extract_references([&x, &zero, &zero], &cfg, fs).unwrap();
        // Fundamental and second harmonic merge into a single group.
        assert_eq!(refs.len(), 1, "freqs: {:?}", refs.iter().map(|r| r.freq_hz).collect::<Vec<_>>());
    }
}
