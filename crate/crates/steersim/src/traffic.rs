//! Request workload: Poisson arrivals over a Zipf-popular content library.

use crate::error::{Error, Result};
use crate::seed::stream_rng;
use crate::wat::UserId;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

/// 1-based file identifier within the content library.
pub type FileId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrafficType {
    Embb,
    Urllc,
}

impl TrafficType {
    pub fn label(self) -> &'static str {
        match self {
            TrafficType::Embb => "embb",
            TrafficType::Urllc => "urllc",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "embb" => Some(TrafficType::Embb),
            "urllc" => Some(TrafficType::Urllc),
            _ => None,
        }
    }
}

/// Zipf probability mass function over `n_files` ranks:
/// `P(f) = Z * f^-alpha` with `Z = 1 / sum_i i^-alpha`. Sums to 1.
pub fn zipf_pmf(n_files: usize, alpha: f64) -> Result<Vec<f64>> {
    if n_files == 0 {
        return Err(Error::invalid(
            "content library must hold at least one file",
        ));
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::invalid(format!(
            "zipf alpha {alpha} must be finite and >= 0"
        )));
    }
    let mut pmf: Vec<f64> = (1..=n_files).map(|f| (f as f64).powf(-alpha)).collect();
    let z: f64 = pmf.iter().sum();
    for p in &mut pmf {
        *p /= z;
    }
    Ok(pmf)
}

/// Poisson probability of `r` events in an interval where the mean count is
/// `lambda * t_interval`. Evaluated in log space so large `r` stays finite.
pub fn poisson_pmf(r: u64, lambda: f64, t_interval: f64) -> Result<f64> {
    let mean = lambda * t_interval;
    if !mean.is_finite() || mean < 0.0 {
        return Err(Error::invalid(format!(
            "lambda * T = {mean} must be finite and >= 0"
        )));
    }
    if mean == 0.0 {
        return Ok(if r == 0 { 1.0 } else { 0.0 });
    }
    let log_p = r as f64 * mean.ln() - mean - ln_factorial(r);
    Ok(log_p.exp())
}

fn ln_factorial(r: u64) -> f64 {
    if r < 1024 {
        (2..=r).map(|k| (k as f64).ln()).sum()
    } else {
        // Stirling series; error < 1e-12 relative for r >= 1024.
        let n = r as f64;
        n * n.ln() - n + 0.5 * (2.0 * std::f64::consts::PI * n).ln() + 1.0 / (12.0 * n)
            - 1.0 / (360.0 * n * n * n)
    }
}

/// Draw i.i.d. uniform file sizes in `[size_min, size_max]` bytes,
/// independent of popularity rank.
pub fn assign_file_sizes(
    n_files: usize,
    size_min: u64,
    size_max: u64,
    rng: &mut impl Rng,
) -> Result<Vec<u64>> {
    if size_min == 0 || size_min > size_max {
        return Err(Error::invalid(format!(
            "file size bounds [{size_min}, {size_max}] must satisfy 0 < min <= max"
        )));
    }
    Ok((0..n_files)
        .map(|_| rng.gen_range(size_min..=size_max))
        .collect())
}

/// A content library: popularity pmf plus per-file sizes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContentLibrary {
    pub zipf_alpha: f64,
    pub popularity: Vec<f64>,
    pub sizes_bytes: Vec<u64>,
    /// Cumulative pmf for inverse-CDF sampling.
    cdf: Vec<f64>,
}

impl ContentLibrary {
    pub fn new(popularity: Vec<f64>, sizes_bytes: Vec<u64>, zipf_alpha: f64) -> Result<Self> {
        if popularity.is_empty() || popularity.len() != sizes_bytes.len() {
            return Err(Error::invalid(
                "popularity and size vectors must be non-empty and equal-length",
            ));
        }
        let total: f64 = popularity.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "popularity must sum to 1 (got {total})"
            )));
        }
        let mut cdf = Vec::with_capacity(popularity.len());
        let mut acc = 0.0;
        for p in &popularity {
            acc += p;
            cdf.push(acc);
        }
        Ok(Self {
            zipf_alpha,
            popularity,
            sizes_bytes,
            cdf,
        })
    }

    /// Build a library with a Zipf pmf and uniformly random sizes drawn from
    /// the given RNG stream.
    pub fn generate(
        n_files: usize,
        alpha: f64,
        size_min: u64,
        size_max: u64,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let pmf = zipf_pmf(n_files, alpha)?;
        let sizes = assign_file_sizes(n_files, size_min, size_max, rng)?;
        Self::new(pmf, sizes, alpha)
    }

    pub fn n_files(&self) -> usize {
        self.popularity.len()
    }

    /// Sample a file id (1-based) by inverse CDF.
    pub fn sample_file(&self, rng: &mut impl Rng) -> FileId {
        let u: f64 = rng.gen();
        let idx = self.cdf.partition_point(|&c| c < u);
        (idx.min(self.n_files() - 1) + 1) as FileId
    }

    pub fn size_of(&self, file: FileId) -> u64 {
        self.sizes_bytes[(file - 1) as usize]
    }
}

/// Poisson arrival process parameters.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ArrivalConfig {
    /// Mean requests per second.
    pub lambda_per_s: f64,
    pub horizon_s: f64,
    pub seed: u64,
}

impl ArrivalConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.lambda_per_s.is_finite() || self.lambda_per_s <= 0.0 {
            return Err(Error::invalid(format!(
                "lambda {} must be finite and > 0",
                self.lambda_per_s
            )));
        }
        if !self.horizon_s.is_finite() || self.horizon_s < 0.0 {
            return Err(Error::invalid(format!(
                "horizon {} must be finite and >= 0",
                self.horizon_s
            )));
        }
        Ok(())
    }
}

/// One content request event.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub arrival_time_s: f64,
    pub user_id: UserId,
    pub file_id: FileId,
    pub size_bytes: u64,
    pub traffic_type: TrafficType,
}

/// Time-ordered request events.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RequestStream {
    pub requests: Vec<Request>,
}

const STREAM_HEADER: &str = "arrival_time_s,user_id,file_id,size_bytes,traffic_type";

impl RequestStream {
    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    /// Export as CSV for replay.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        let mut emit = || -> std::io::Result<()> {
            writeln!(w, "{STREAM_HEADER}")?;
            for r in &self.requests {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    crate::metrics::fmt_sig(r.arrival_time_s),
                    r.user_id,
                    r.file_id,
                    r.size_bytes,
                    r.traffic_type.label()
                )?;
            }
            w.flush()
        };
        emit().map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let reader = BufReader::new(file);
        let mut requests = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if i == 0 {
                if line != STREAM_HEADER {
                    return Err(Error::TraceFormat {
                        path: path.into(),
                        line: 1,
                        message: format!("unexpected header {line:?}"),
                    });
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| Error::TraceFormat {
                path: path.into(),
                line: i + 1,
                message,
            };
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(bad(format!("expected 5 fields, got {}", fields.len())));
            }
            requests.push(Request {
                arrival_time_s: fields[0]
                    .parse()
                    .map_err(|e| bad(format!("arrival_time_s: {e}")))?,
                user_id: UserId(
                    fields[1]
                        .parse()
                        .map_err(|e| bad(format!("user_id: {e}")))?,
                ),
                file_id: fields[2]
                    .parse()
                    .map_err(|e| bad(format!("file_id: {e}")))?,
                size_bytes: fields[3]
                    .parse()
                    .map_err(|e| bad(format!("size_bytes: {e}")))?,
                traffic_type: TrafficType::from_label(fields[4])
                    .ok_or_else(|| bad(format!("unknown traffic type {:?}", fields[4])))?,
            });
            // Streams are time-ordered by construction; a replayed file
            // must be too.
            if let [.., prev, last] = requests.as_slice() {
                if last.arrival_time_s < prev.arrival_time_s {
                    return Err(Error::TraceFormat {
                        path: path.into(),
                        line: i + 1,
                        message: format!(
                            "arrival times out of order: {} after {}",
                            last.arrival_time_s, prev.arrival_time_s
                        ),
                    });
                }
            }
        }
        Ok(Self { requests })
    }
}

/// Generate the request stream: exponential inter-arrival times with rate
/// lambda (the process whose interval counts are Poisson distributed), a
/// uniformly random user per event, a Zipf-sampled file, eMBB traffic type.
/// Deterministic for a given `cfg.seed`.
pub fn generate_requests(
    cfg: &ArrivalConfig,
    library: &ContentLibrary,
    user_ids: &[UserId],
) -> Result<RequestStream> {
    cfg.validate()?;
    if user_ids.is_empty() {
        return Err(Error::invalid("request generation needs at least one user"));
    }
    let mut arrivals = stream_rng(cfg.seed, "arrivals", 0);
    let mut picks = stream_rng(cfg.seed, "files", 0);

    let mut requests = Vec::new();
    let mut t = 0.0f64;
    loop {
        let u: f64 = arrivals.gen();
        t += -(1.0 - u).ln() / cfg.lambda_per_s;
        if t > cfg.horizon_s {
            break;
        }
        let user = user_ids[picks.gen_range(0..user_ids.len())];
        let file = library.sample_file(&mut picks);
        requests.push(Request {
            arrival_time_s: t,
            user_id: user,
            file_id: file,
            size_bytes: library.size_of(file),
            traffic_type: TrafficType::Embb,
        });
    }
    Ok(RequestStream { requests })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream_rng;

    #[test]
    fn zipf_uniform_at_alpha_zero() {
        let pmf = zipf_pmf(4, 0.0).unwrap();
        for p in pmf {
            assert!((p - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn zipf_single_file() {
        assert_eq!(zipf_pmf(1, 2.3).unwrap(), vec![1.0]);
    }

    #[test]
    fn zipf_n5_alpha1_matches_exact_rational() {
        // Z = 60/137 for n=5, alpha=1; P(f) = (60/137) / f.
        let pmf = zipf_pmf(5, 1.0).unwrap();
        let z = 60.0 / 137.0;
        for (i, p) in pmf.iter().enumerate() {
            assert!(
                (p - z / (i as f64 + 1.0)).abs() < 1e-12,
                "f={} p={}",
                i + 1,
                p
            );
        }
        assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zipf_rejects_bad_inputs() {
        assert!(zipf_pmf(0, 1.0).is_err());
        assert!(zipf_pmf(10, -0.5).is_err());
    }

    #[test]
    fn zipf_sums_to_one_and_non_increasing_large_n() {
        for &(n, alpha) in &[(1000usize, 0.8f64), (100_000, 3.0), (1_000_000, 0.0)] {
            let pmf = zipf_pmf(n, alpha).unwrap();
            assert!(
                (pmf.iter().sum::<f64>() - 1.0).abs() < 1e-9,
                "n={n} a={alpha}"
            );
            for w in pmf.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn poisson_pmf_values() {
        assert_eq!(poisson_pmf(0, 0.0, 1.0).unwrap(), 1.0);
        assert_eq!(poisson_pmf(3, 0.0, 1.0).unwrap(), 0.0);
        // e^-2 from a 50-digit evaluation.
        let p = poisson_pmf(0, 2.0, 1.0).unwrap();
        assert!((p - 0.135_335_283_236_612_7).abs() < 1e-15);
        assert!(poisson_pmf(1, -1.0, 1.0).is_err());
    }

    #[test]
    fn poisson_partial_sum_reaches_one() {
        let total: f64 = (0..=50).map(|r| poisson_pmf(r, 5.0, 1.0).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12, "sum = {total}");
    }

    #[test]
    fn ln_factorial_consistent_across_regimes() {
        // Stirling branch against the exact-sum branch at the crossover.
        let exact: f64 = (2..=2000u64).map(|k| (k as f64).ln()).sum();
        let approx = ln_factorial(2000);
        assert!((exact - approx).abs() / exact < 1e-12);
    }

    #[test]
    fn sizes_respect_bounds_and_degenerate_range() {
        let mut rng = stream_rng(1, "sizes", 0);
        let sizes = assign_file_sizes(100, 5, 5, &mut rng).unwrap();
        assert!(sizes.iter().all(|&s| s == 5));
        let sizes = assign_file_sizes(1000, 10, 20, &mut rng).unwrap();
        assert!(sizes.iter().all(|&s| (10..=20).contains(&s)));
        assert!(assign_file_sizes(10, 30, 20, &mut rng).is_err());
        assert!(assign_file_sizes(10, 0, 20, &mut rng).is_err());
    }

    #[test]
    fn size_mean_and_rank_independence() {
        let mut rng = stream_rng(2, "sizes", 0);
        let n = 10_000usize;
        let (lo, hi) = (1_000_000u64, 10_000_000u64);
        let sizes = assign_file_sizes(n, lo, hi, &mut rng).unwrap();
        let mean = sizes.iter().map(|&s| s as f64).sum::<f64>() / n as f64;
        let expected = (lo + hi) as f64 / 2.0;
        assert!((mean - expected).abs() / expected < 0.02, "mean = {mean}");

        // Sample correlation between rank and size stays near zero.
        let xs: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let ys: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
        let mx = xs.iter().sum::<f64>() / n as f64;
        let my = ys.iter().sum::<f64>() / n as f64;
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        let corr = cov / (vx * vy).sqrt();
        assert!(corr.abs() < 0.03, "corr = {corr}");
    }

    #[test]
    fn sample_file_degenerate_library() {
        let mut rng = stream_rng(3, "files", 0);
        let lib = ContentLibrary::generate(1, 1.0, 10, 10, &mut rng).unwrap();
        for _ in 0..100 {
            assert_eq!(lib.sample_file(&mut rng), 1);
        }
    }

    #[test]
    fn sample_file_frequencies_track_pmf() {
        let mut rng = stream_rng(4, "files", 0);
        let lib = ContentLibrary::generate(5, 1.0, 10, 10, &mut rng).unwrap();
        let draws = 100_000usize;
        let mut counts = [0u32; 5];
        for _ in 0..draws {
            counts[(lib.sample_file(&mut rng) - 1) as usize] += 1;
        }
        let f1 = counts[0] as f64 / draws as f64;
        assert!((f1 - 60.0 / 137.0).abs() < 0.01, "f1 = {f1}");
    }

    #[test]
    fn sample_file_uniform_within_3_sigma() {
        let mut rng = stream_rng(5, "files", 0);
        let n = 20usize;
        let lib = ContentLibrary::generate(n, 0.0, 10, 10, &mut rng).unwrap();
        let draws = 100_000usize;
        let mut counts = vec![0u32; n];
        for _ in 0..draws {
            counts[(lib.sample_file(&mut rng) - 1) as usize] += 1;
        }
        let p = 1.0 / n as f64;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for (f, &c) in counts.iter().enumerate() {
            let dev = (c as f64 - draws as f64 * p).abs();
            assert!(dev < 3.0 * sigma + 1.0, "file {} off by {dev}", f + 1);
        }
    }

    #[test]
    fn generate_requests_zero_horizon_is_empty() {
        let mut rng = stream_rng(6, "lib", 0);
        let lib = ContentLibrary::generate(10, 0.8, 100, 200, &mut rng).unwrap();
        let cfg = ArrivalConfig {
            lambda_per_s: 2.0,
            horizon_s: 0.0,
            seed: 1,
        };
        let stream = generate_requests(&cfg, &lib, &[UserId(0)]).unwrap();
        assert!(stream.is_empty());
    }

    #[test]
    fn generate_requests_needs_users() {
        let mut rng = stream_rng(7, "lib", 0);
        let lib = ContentLibrary::generate(10, 0.8, 100, 200, &mut rng).unwrap();
        let cfg = ArrivalConfig {
            lambda_per_s: 2.0,
            horizon_s: 1.0,
            seed: 1,
        };
        assert!(generate_requests(&cfg, &lib, &[]).is_err());
    }

    #[test]
    fn generate_requests_time_sorted_and_deterministic() {
        let mut rng = stream_rng(8, "lib", 0);
        let lib = ContentLibrary::generate(50, 0.8, 100, 200, &mut rng).unwrap();
        let cfg = ArrivalConfig {
            lambda_per_s: 3.0,
            horizon_s: 100.0,
            seed: 9,
        };
        let users: Vec<UserId> = (0..10).map(UserId).collect();
        let a = generate_requests(&cfg, &lib, &users).unwrap();
        let b = generate_requests(&cfg, &lib, &users).unwrap();
        assert_eq!(a, b);
        for w in a.requests.windows(2) {
            assert!(w[0].arrival_time_s <= w[1].arrival_time_s);
        }
    }

    #[test]
    fn stream_csv_round_trip() {
        let mut rng = stream_rng(10, "lib", 0);
        let lib = ContentLibrary::generate(20, 1.0, 1000, 2000, &mut rng).unwrap();
        let cfg = ArrivalConfig {
            lambda_per_s: 5.0,
            horizon_s: 20.0,
            seed: 4,
        };
        let users: Vec<UserId> = (0..5).map(UserId).collect();
        let stream = generate_requests(&cfg, &lib, &users).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stream.csv");
        stream.write_csv(&path).unwrap();
        let back = RequestStream::read_csv(&path).unwrap();
        assert_eq!(back.len(), stream.len());
        // Times survive to 6 significant digits; ids exactly.
        for (a, b) in stream.requests.iter().zip(&back.requests) {
            assert_eq!(a.user_id, b.user_id);
            assert_eq!(a.file_id, b.file_id);
            assert_eq!(a.size_bytes, b.size_bytes);
            assert!(
                (a.arrival_time_s - b.arrival_time_s).abs() <= 1e-4 * a.arrival_time_s.max(1.0)
            );
        }
        // Canonical form: write(read(write(x))) == write(x).
        let path2 = dir.path().join("stream2.csv");
        back.write_csv(&path2).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn unsorted_stream_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(
            &path,
            "arrival_time_s,user_id,file_id,size_bytes,traffic_type\n\
             2.0,1,1,100,embb\n\
             1.0,2,1,100,embb\n",
        )
        .unwrap();
        let err = RequestStream::read_csv(&path).unwrap_err();
        assert!(err.to_string().contains("out of order"), "{err}");
    }
}
