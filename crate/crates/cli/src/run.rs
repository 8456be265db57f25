use serde_json::json;

use rank1_core::densities::{concentration_scan, ProductDensity};
use rank1_core::haar::{radial_density_check, RngStream};
use rank1_core::montecarlo::{compare_modes, mixing_experiment, product_radials};
use rank1_core::pairs::PairDescriptor;
use rank1_core::plancherel::{cn, fit_log_law, l_star};
use rank1_core::Result;

use crate::config::{Command, ExperimentConfig};
use crate::emit::{float, json, Artifact, Csv};

/// Truncation tolerance for the cn table.
const CN_TOL: f64 = 1e-15;

/// Execute a resolved config. The first artifact is the primary output.
pub fn run(c: &ExperimentConfig) -> Result<Vec<Artifact>> {
    // resolve() guarantees every field read below is present
    let pair = || -> Result<PairDescriptor> {
        let p = PairDescriptor::from_kind(c.pair.unwrap(), c.n.unwrap(), c.mode.unwrap())?;
        Ok(match (c.m_alpha, c.m_2alpha) {
            (Some(a), Some(b)) => p.with_multiplicities(a, b),
            _ => p,
        })
    };
    let rng = || RngStream::new(c.seed.unwrap(), c.stream.unwrap());
    let (t1, t2) = (c.t1.unwrap_or(0.0), c.t2.unwrap_or(0.0));

    Ok(match c.command {
        Command::Density => {
            let d = ProductDensity::with_kernel_exponent(&pair()?, t1, t2, c.kernel_exponent)?;
            let mut csv = Csv::new(c, &["u", "pdf"]);
            for (u, p) in d.grid(c.grid.unwrap()) {
                csv.row(&[float(u), float(p)]);
            }
            vec![csv.finish(), json(c, json!({ "density": d }))]
        }
        Command::Sample => {
            let set = product_radials(&pair()?, t1, t2, c.samples.unwrap(), &rng(), c.reduced.unwrap())?;
            let mut csv = Csv::new(c, &["u"]);
            for v in &set.values {
                csv.row(&[float(*v)]);
            }
            vec![csv.finish()]
        }
        Command::Compare => {
            let r = compare_modes(
                c.pair.unwrap(),
                c.n.unwrap(),
                t1,
                t2,
                c.samples.unwrap(),
                &rng(),
                c.threshold.unwrap(),
            )?;
            vec![json(c, json!({ "report": r }))]
        }
        Command::HaarCheck => {
            let r = radial_density_check(&pair()?, c.samples.unwrap(), &rng())?;
            vec![json(c, json!({ "check": r }))]
        }
        Command::Mixing => {
            let t = mixing_experiment(c.n.unwrap(), t1, t2, c.factors.unwrap(), c.samples.unwrap(), &rng())?;
            let mut csv = Csv::new(c, &["factors", "distance"]);
            csv.comment("baseline", t.baseline);
            for r in &t.rows {
                csv.row(&[r.factors.to_string(), float(r.distance)]);
            }
            vec![csv.finish(), json(c, json!({ "table": t }))]
        }
        Command::Plancherel => {
            let n_list = c.n_list.as_deref().unwrap();
            let eps = c.eps.unwrap();
            let stars = n_list.iter().map(|&n| l_star(n, t1, t2, eps)).collect::<Result<Vec<_>>>()?;
            let mut sums = Vec::new();
            for &n in n_list {
                for l in 1..=c.l_max.unwrap() {
                    sums.push(cn(n, t1, t2, l, CN_TOL)?);
                }
            }
            let fit = if n_list.len() >= 2 {
                let ls: Vec<u64> = stars.iter().map(|s| s.l).collect();
                Some(fit_log_law(n_list, &ls))
            } else {
                None
            };
            vec![json(c, json!({ "l_star": stars, "fit": fit, "cn": sums }))]
        }
        Command::LimitScan => {
            let rows = concentration_scan(
                c.pair.unwrap(),
                c.mode.unwrap(),
                t1,
                t2,
                c.n_list.as_deref().unwrap(),
                c.eps.unwrap(),
            )?;
            let mut csv = Csv::new(c, &["n", "mass_near_edge", "mass_near_a1"]);
            for r in &rows {
                csv.row(&[r.n.to_string(), float(r.mass_near_edge), float(r.mass_near_a1)]);
            }
            vec![csv.finish()]
        }
    })
}
