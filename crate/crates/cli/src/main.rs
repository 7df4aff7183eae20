//! Command-line front end: every experiment is a subcommand that writes a
//! JSON run record (parameters, seed, qubit ledger, results) and, where it
//! makes sense, a CSV outcome distribution with fixed columns
//! (outcome_decimal, outcome_binary, probability).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use periodlab_core::closedform::{simon_table, ShorAmplitudes};
use periodlab_core::ekera::{self, EHInstance};
use periodlab_core::evenmansour::{em_attack, EMInstance};
use periodlab_core::f2lin::BitVec;
use periodlab_core::gfpm::{ddh_distinguish, find_qr_generator, DdhVerdict, GFContext};
use periodlab_core::group::GroupSpec;
use periodlab_core::hashing::{self, FamilySpec, OutputMap};
use periodlab_core::moscaekert::semiclassical_run;
use periodlab_core::offline::{offline_attack, OfflineParams};
use periodlab_core::shor::{figure_map, hashed_shor, OrderInstance};
use periodlab_core::simon::{query_statistics, random_simon};
use periodlab_core::verify;

const ARTIFACT_VERSION: &str = "1.0.0";

#[derive(Parser)]
#[command(name = "periodlab", version, about = "Hashed quantum period finding laboratory")]
struct Cli {
    /// Base RNG seed; every randomized run is a pure function of it.
    #[arg(long, global = true, env = "PERIODLAB_SEED", default_value_t = 1)]
    seed: u64,
    /// Directory for the JSON run record and CSV outputs.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Hidden-period recovery with hashed outputs: query statistics over
    /// seeded trials.
    Simon {
        #[arg(long, default_value_t = 6)]
        n: usize,
        /// Hash range bits.
        #[arg(long, default_value_t = 1)]
        t: usize,
        /// Use the identity output map instead of a hash.
        #[arg(long)]
        identity: bool,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        /// Also write the exact outcome distribution of one seeded instance.
        #[arg(long)]
        dump_dist: bool,
    },
    /// Order finding: recover ord_N(a) from hashed runs.
    Shor {
        #[arg(long = "N")]
        modulus: u64,
        #[arg(long)]
        a: u64,
        /// Input register width in qubits.
        #[arg(long)]
        q: usize,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long)]
        identity: bool,
        /// Write the exact outcome distribution CSV.
        #[arg(long)]
        dump_dist: bool,
    },
    /// Short discrete logarithm from two-register sampling.
    Ekera {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        g: u64,
        /// Planted logarithm.
        #[arg(long)]
        d: u64,
        /// Bit-length bound on d.
        #[arg(long)]
        m: usize,
        /// Tradeoff parameter; the b register has ceil(m/s) bits.
        #[arg(long, default_value_t = 1)]
        s: usize,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, default_value_t = 30)]
        samples: usize,
    },
    /// Even-Mansour whitening-key recovery on n+1 wires.
    EmAttack {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        rounds: usize,
        /// Round key as a binary string of n/2 bits; random if omitted.
        #[arg(long)]
        kprime: Option<String>,
        /// Whitening key as a binary string of n bits; random if omitted.
        #[arg(long)]
        k: Option<String>,
    },
    /// Offline period finding: classical cipher queries, per-guess
    /// periodicity testing.
    Offline {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        rounds: usize,
        #[arg(long)]
        kprime: Option<String>,
        #[arg(long)]
        k: Option<String>,
        /// Hash range bits; defaults to ceil(log2 n).
        #[arg(long)]
        t: Option<usize>,
    },
    /// Semiclassical order finding with one reused input qubit.
    MoscaEkert {
        #[arg(long = "N")]
        modulus: u64,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        q: usize,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        /// Write the empirical outcome distribution CSV.
        #[arg(long)]
        dump_dist: bool,
    },
    /// Norm-compressed DDH distinguishing in GF(p^m).
    Ddh {
        #[arg(long, default_value_t = 7)]
        p: u64,
        #[arg(long, default_value_t = 5)]
        m: usize,
        /// Number of planted (Diffie-Hellman) instances.
        #[arg(long, default_value_t = 5)]
        planted: u64,
        /// Number of uniformly random instances.
        #[arg(long, default_value_t = 5)]
        random: u64,
    },
    /// Run the acceptance suite and print one pass/fail line per check.
    Verify {
        /// Only the exact closed-form checks.
        #[arg(long, conflicts_with = "full")]
        quick: bool,
        /// All ten checks, including the statistical suites.
        #[arg(long)]
        full: bool,
    },
}

fn write_csv(path: &Path, bits: usize, probs: &[f64]) -> std::io::Result<()> {
    let mut out = String::from("outcome_decimal,outcome_binary,probability\n");
    for (y, p) in probs.iter().enumerate() {
        out.push_str(&format!("{y},{},{p}\n", BitVec::from_word(y as u64, bits)));
    }
    fs::write(path, out)
}

struct Recorder {
    subcommand: &'static str,
    out_dir: PathBuf,
    seed: u64,
    started: Instant,
}

impl Recorder {
    fn new(subcommand: &'static str, cli: &Cli) -> std::io::Result<Self> {
        fs::create_dir_all(&cli.out_dir)?;
        Ok(Recorder {
            subcommand,
            out_dir: cli.out_dir.clone(),
            seed: cli.seed,
            started: Instant::now(),
        })
    }

    fn csv_path(&self) -> PathBuf {
        self.out_dir.join(format!("{}-dist.csv", self.subcommand))
    }

    fn finish(
        &self,
        params: Value,
        qubit_ledger: Value,
        outputs: Value,
        csv: Option<&Path>,
    ) -> std::io::Result<()> {
        let record = json!({
            "artifact_version": ARTIFACT_VERSION,
            "subcommand": self.subcommand,
            "params": params,
            "seed": self.seed,
            "wall_time_ms": self.started.elapsed().as_millis() as u64,
            "qubit_ledger": qubit_ledger,
            "outputs": outputs,
            "csv_path": csv.map(|p| p.display().to_string()),
        });
        let path = self.out_dir.join(format!("{}-record.json", self.subcommand));
        fs::write(path, serde_json::to_string_pretty(&record)?)
    }
}

fn parse_bits(s: &str, len: usize, what: &str) -> Result<BitVec, String> {
    let v: BitVec = s.parse().map_err(|e| format!("{what}: {e}"))?;
    if v.len() != len {
        return Err(format!("{what} must have {len} bits, got {}", v.len()));
    }
    Ok(v)
}

fn run(cli: &Cli) -> Result<bool, String> {
    let seed = cli.seed;
    match &cli.cmd {
        Cmd::Simon { n, t, identity, trials, dump_dist } => {
            let rec = Recorder::new("simon", cli).map_err(|e| e.to_string())?;
            let (n, t) = (*n, *t);
            let spec = if *identity {
                FamilySpec::identity(n)
            } else {
                FamilySpec::hashed(n, t)
            };
            let report = query_statistics(n, &spec, *trials, seed).map_err(|e| e.to_string())?;
            let mut csv = None;
            if *dump_dist {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let s = BitVec::from_word(rng.gen_range(1..1u64 << n), n);
                let inst = random_simon(n, &s, &mut rng).map_err(|e| e.to_string())?;
                let map = hashing::sample(&spec, &mut rng);
                let dist = simon_table(&inst.f, n, &map).distribution();
                let path = rec.csv_path();
                write_csv(&path, n, &dist).map_err(|e| e.to_string())?;
                csv = Some(path);
            }
            let out_t = spec.t;
            rec.finish(
                json!({"n": n, "t": out_t, "identity": identity, "trials": trials}),
                json!({
                    "input_bits": n,
                    "output_bits": out_t,
                    "total": n + out_t,
                    "plain_total": 2 * n,
                }),
                serde_json::to_value(&report).map_err(|e| e.to_string())?,
                csv.as_deref(),
            )
            .map_err(|e| e.to_string())?;
            Ok(true)
        }
        Cmd::Shor { modulus, a, q, t, identity, dump_dist } => {
            let rec = Recorder::new("shor", cli).map_err(|e| e.to_string())?;
            let inst = OrderInstance::new(*modulus, *a, *q).map_err(|e| e.to_string())?;
            let bits = hashing::zn_bits(*modulus);
            let spec = if *identity {
                FamilySpec::identity(bits)
            } else {
                FamilySpec::hashed(bits, *t)
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (order, measurements) =
                hashed_shor(&inst, &spec, &mut rng).map_err(|e| e.to_string())?;
            let mut csv = None;
            if *dump_dist {
                // the reference residue partition exists only for this
                // parameter set; other runs dump a seeded random hash
                let map = if (*modulus, *a, *q, spec.t, *identity) == (51, 2, 12, 1, false) {
                    figure_map()
                } else if *identity {
                    OutputMap::Identity { bits }
                } else {
                    hashing::sample(&spec, &mut ChaCha8Rng::seed_from_u64(seed))
                };
                let dist = ShorAmplitudes::new(&inst).distribution(&map);
                let path = rec.csv_path();
                write_csv(&path, *q, &dist).map_err(|e| e.to_string())?;
                csv = Some(path);
            }
            rec.finish(
                json!({"N": modulus, "a": a, "q": q, "t": spec.t, "identity": identity}),
                json!({
                    "input_bits": q,
                    "output_bits": spec.t,
                    "total": q + spec.t,
                    "plain_total": q + bits,
                }),
                json!({"order": order, "true_order": inst.d, "measurements": measurements}),
                csv.as_deref(),
            )
            .map_err(|e| e.to_string())?;
            Ok(order == inst.d)
        }
        Cmd::Ekera { p, g, d, m, s, t, samples } => {
            let rec = Recorder::new("ekera", cli).map_err(|e| e.to_string())?;
            let inst =
                EHInstance::with_planted(*p, *g, *d, *m, *s).map_err(|e| e.to_string())?;
            let spec = FamilySpec::hashed(hashing::zn_bits(*p), *t);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let outcomes = ekera::sample_outcomes(&inst, &spec, *samples, &mut rng);
            let recovered =
                ekera::recover_d_scoring(&inst, &outcomes).map_err(|e| e.to_string())?;
            let ledger = ekera::qubit_ledger(&inst, *t);
            rec.finish(
                json!({"p": p, "g": g, "d": d, "m": m, "s": s, "t": t, "samples": samples}),
                serde_json::to_value(&ledger).map_err(|e| e.to_string())?,
                json!({"recovered_d": recovered, "planted_d": d}),
                None,
            )
            .map_err(|e| e.to_string())?;
            Ok(recovered == *d)
        }
        Cmd::EmAttack { n, rounds, kprime, k } => {
            let rec = Recorder::new("em-attack", cli).map_err(|e| e.to_string())?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let kprime = match kprime {
                Some(s) => parse_bits(s, n / 2, "kprime")?,
                None => BitVec::from_word(rng.gen_range(0..1u64 << (n / 2)), n / 2),
            };
            let k = match k {
                Some(s) => parse_bits(s, *n, "k")?,
                None => BitVec::from_word(rng.gen_range(0..1u64 << n), *n),
            };
            let inst =
                EMInstance::new(*n, *rounds, kprime, k).map_err(|e| e.to_string())?;
            let recovered = em_attack(&inst, &mut rng).map_err(|e| e.to_string())?;
            let success = recovered == inst.k;
            rec.finish(
                json!({
                    "n": n, "rounds": rounds,
                    "kprime": inst.kprime.to_string(), "k": inst.k.to_string(),
                }),
                json!({
                    "input_bits": n,
                    "output_bits": 1,
                    "total": n + 1,
                    "plain_total": 2 * n,
                }),
                json!({"recovered_k": recovered.to_string(), "success": success}),
                None,
            )
            .map_err(|e| e.to_string())?;
            Ok(success)
        }
        Cmd::Offline { n, rounds, kprime, k, t } => {
            let rec = Recorder::new("offline", cli).map_err(|e| e.to_string())?;
            let params = OfflineParams::new(*n, *t).map_err(|e| e.to_string())?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let kprime = match kprime {
                Some(s) => parse_bits(s, n / 2, "kprime")?,
                None => BitVec::from_word(rng.gen_range(0..1u64 << (n / 2)), n / 2),
            };
            let k = match k {
                Some(s) => parse_bits(s, *n, "k")?,
                None => BitVec::from_word(rng.gen_range(0..1u64 << n), *n),
            };
            let inst =
                EMInstance::new(*n, *rounds, kprime, k).map_err(|e| e.to_string())?;
            let report = offline_attack(&inst, &params, &mut rng).map_err(|e| e.to_string())?;
            let success = report.k == inst.k;
            rec.finish(
                json!({
                    "n": n, "rounds": rounds, "t": params.t, "copies": params.copies,
                    "kprime": inst.kprime.to_string(), "k": inst.k.to_string(),
                }),
                serde_json::to_value(&report.ledger).map_err(|e| e.to_string())?,
                json!({
                    "recovered_k": report.k.to_string(),
                    "success": success,
                    "classical_queries": report.classical_queries,
                    "bad_fraction": report.bad_fraction,
                }),
                None,
            )
            .map_err(|e| e.to_string())?;
            Ok(success)
        }
        Cmd::MoscaEkert { modulus, a, q, samples, dump_dist } => {
            let rec = Recorder::new("mosca-ekert", cli).map_err(|e| e.to_string())?;
            let group = GroupSpec::ZnMul { n: *modulus };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut counts = vec![0u64; 1 << q];
            for _ in 0..*samples {
                let y = semiclassical_run(&group, *a, *q, None, &mut rng)
                    .map_err(|e| e.to_string())?;
                counts[y as usize] += 1;
            }
            let emp: Vec<f64> =
                counts.iter().map(|&c| c as f64 / *samples as f64).collect();
            let mut csv = None;
            if *dump_dist {
                let path = rec.csv_path();
                write_csv(&path, *q, &emp).map_err(|e| e.to_string())?;
                csv = Some(path);
            }
            let bits = group.encoding_bits();
            rec.finish(
                json!({"N": modulus, "a": a, "q": q, "samples": samples}),
                json!({
                    "control_qubits": 1,
                    "output_bits": bits,
                    "total": 1 + bits,
                }),
                json!({"counts": counts}),
                csv.as_deref(),
            )
            .map_err(|e| e.to_string())?;
            Ok(true)
        }
        Cmd::Ddh { p, m, planted, random } => {
            let rec = Recorder::new("ddh", cli).map_err(|e| e.to_string())?;
            let ctx = GFContext::new(*p, *m).map_err(|e| e.to_string())?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = find_qr_generator(&ctx, &mut rng).map_err(|e| e.to_string())?;
            let order = ctx.q1 * ctx.q2;
            let mut planted_accepts = 0u64;
            for _ in 0..*planted {
                let a = rng.gen_range(1..order);
                let b = rng.gen_range(1..order);
                let c = (u128::from(a) * u128::from(b) % u128::from(order)) as u64;
                let rep = ddh_distinguish(
                    &ctx, g, ctx.pow(g, a), ctx.pow(g, b), ctx.pow(g, c), &mut rng,
                )
                .map_err(|e| e.to_string())?;
                if rep.verdict == DdhVerdict::Ddh {
                    planted_accepts += 1;
                }
            }
            let mut random_rejects = 0u64;
            for _ in 0..*random {
                let a = rng.gen_range(1..order);
                let b = rng.gen_range(1..order);
                let c = rng.gen_range(1..order);
                let rep = ddh_distinguish(
                    &ctx, g, ctx.pow(g, a), ctx.pow(g, b), ctx.pow(g, c), &mut rng,
                )
                .map_err(|e| e.to_string())?;
                if rep.verdict == DdhVerdict::Random {
                    random_rejects += 1;
                }
            }
            let hashed_bits = hashing::zn_bits(*p);
            let plain_bits = hashing::zn_bits(ctx.field_size());
            rec.finish(
                json!({"p": p, "m": m, "planted": planted, "random": random}),
                json!({
                    "control_qubits": 1,
                    "hashed_output_bits": hashed_bits,
                    "plain_output_bits": plain_bits,
                    "hashed_total": 1 + hashed_bits,
                    "plain_total": 1 + plain_bits,
                }),
                json!({
                    "q1": ctx.q1,
                    "q2": ctx.q2,
                    "planted_accepts": planted_accepts,
                    "random_rejects": random_rejects,
                }),
                None,
            )
            .map_err(|e| e.to_string())?;
            Ok(planted_accepts == *planted)
        }
        Cmd::Verify { full, .. } => {
            let rec = Recorder::new("verify", cli).map_err(|e| e.to_string())?;
            let checks = if *full {
                verify::full_checks(seed).map_err(|e| e.to_string())?
            } else {
                verify::quick_checks().map_err(|e| e.to_string())?
            };
            for check in &checks {
                println!("{}", check.line());
            }
            let all_passed = checks.iter().all(|c| c.passed);
            rec.finish(
                json!({"mode": if *full { "full" } else { "quick" }}),
                json!(null),
                serde_json::to_value(&checks).map_err(|e| e.to_string())?,
                None,
            )
            .map_err(|e| e.to_string())?;
            Ok(all_passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("run completed but the expected result did not hold");
            ExitCode::from(1)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
