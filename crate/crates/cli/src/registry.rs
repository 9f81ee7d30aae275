use std::collections::{BTreeMap, BTreeSet};

use anyhow::{anyhow, bail, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recip_core::laws::{self, SatoTateSource, SatoTateSpec};
use recip_core::modarith::sieve_primes;
use recip_core::qseries::{eta_product, theta_series};
use recip_core::{CurvePoint, EtaSpec, IntPoly, LawReport, QSeries, QuadForm, WeierstrassCurve};

use crate::cache::{CoefficientCache, Kind};
use crate::config::RunConfig;

/// A finished law run: the report and, for some laws, a CSV table.
pub struct LawOutput {
    pub report: LawReport,
    pub csv: Option<String>,
}

impl From<LawReport> for LawOutput {
    fn from(report: LawReport) -> Self {
        LawOutput { report, csv: None }
    }
}

type Runner = fn(&RunConfig, &CoefficientCache) -> Result<LawOutput>;

pub struct Law {
    pub id: &'static str,
    pub about: &'static str,
    pub run: Runner,
}

pub const LAWS: &[Law] = &[
    Law { id: "qr", about: "quadratic reciprocity and (q*/p) = (p/q)", run: qr },
    Law { id: "cyclotomic", about: "N_p(Phi_m) = phi(m) iff p = 1 mod m", run: cyclotomic },
    Law { id: "quad-residues", about: "split residue classes of quadratic polynomials", run: quad_residues },
    Law { id: "gf-quadratic", about: "N_p(T^2 - T - 1) from (q - q^2 - q^3 + q^4)/(1 - q^5)", run: gf_quadratic },
    Law { id: "cubic23", about: "N_p(T^3 - T - 1) = 1 + a_p from eta_{1,23}", run: cubic23 },
    Law { id: "weight1", about: "N_p(T^3 + T - 1) from a weight-one theta difference", run: weight1 },
    Law { id: "gauss2", about: "T^3 - 2 splits iff p = x^2 + 27y^2", run: gauss2 },
    Law { id: "modularity-11", about: "a_p = c_p for y^2 + y = x^3 - x^2", run: modularity_11 },
    Law { id: "modularity-32", about: "a_p = c_p for y^2 = x^3 - x", run: modularity_32 },
    Law { id: "modularity-36", about: "a_p = c_p for y^2 = x^3 + 1", run: modularity_36 },
    Law { id: "theta11", about: "a_p = (B_p - C_p)/4 from quaternary theta series", run: theta11 },
    Law { id: "hecke", about: "Hecke relations of the eta products and Delta", run: hecke },
    Law { id: "ramanujan", about: "tau(p) = 1 + p^11 mod 691", run: ramanujan },
    Law { id: "sato-tate", about: "semicircle distribution of normalized traces", run: sato_tate },
    Law { id: "chebotarev", about: "factorization pattern frequencies of T^3 - T - 1", run: chebotarev },
    Law { id: "torsion-split", about: "complete splitting in Q(E[l])", run: torsion_split },
    Law { id: "mu-split", about: "x^l = 1 has l solutions iff p = 1 mod l", run: mu_split },
    Law { id: "L-compare", about: "Euler products against Hecke series coefficientwise", run: l_compare },
    Law { id: "eta12", about: "q prod (1 - q^{12k})^2 as a signed theta series", run: eta12 },
    Law { id: "modular-symmetry", about: "functional equations of eta_{1,23} and eta_{1^2,11^2}", run: modular_symmetry },
    Law { id: "group-law", about: "sampled associativity and Lagrange on E(F_p)", run: group_law },
];

pub fn find(id: &str) -> Option<&'static Law> {
    LAWS.iter().find(|l| l.id == id)
}

pub fn ids() -> Vec<&'static str> {
    LAWS.iter().map(|l| l.id).collect()
}

fn cached_eta(cache: &CoefficientCache, spec: &EtaSpec, truncation: usize) -> Result<QSeries> {
    cache.get_or_compute(Kind::Eta, &spec.to_string(), truncation, || {
        Ok(eta_product(spec, truncation)?)
    })
}

fn cached_theta(
    cache: &CoefficientCache,
    name: &str,
    form: &QuadForm,
    truncation: usize,
) -> Result<QSeries> {
    cache.get_or_compute(Kind::Theta, name, truncation, || Ok(theta_series(form, truncation)?))
}

/// The eta product attached to a curve: `--eta`, or the known one for the
/// curves of conductor 11, 32 and 36.
pub fn eta_for(curve: &WeierstrassCurve, eta: Option<&str>) -> Result<EtaSpec> {
    if let Some(text) = eta {
        return Ok(EtaSpec::parse(text)?);
    }
    let known = [
        (WeierstrassCurve::conductor_11(), "1^2 11^2"),
        (WeierstrassCurve::conductor_32(), "4^2 8^2"),
        (WeierstrassCurve::conductor_36(), "6^4"),
    ];
    known
        .iter()
        .find(|(e, _)| e.coeffs() == curve.coeffs())
        .map(|(_, s)| EtaSpec::parse(s).expect("valid spec"))
        .ok_or_else(|| anyhow!("no known eta product for {curve}; pass --eta"))
}

fn curve(cfg: &RunConfig) -> Result<WeierstrassCurve> {
    match &cfg.curve {
        Some(text) => Ok(WeierstrassCurve::parse(text)?),
        None => Ok(WeierstrassCurve::conductor_11()),
    }
}

fn qr(cfg: &RunConfig, _: &CoefficientCache) -> Result<LawOutput> {
    Ok(laws::verify_quadratic_reciprocity(cfg.pmax_or(500))?.into())
}

fn cyclotomic(cfg: &RunConfig, _: &CoefficientCache) -> Result<LawOutput> {
    let pmax = cfg.pmax_or(10_000);
    let ms: Vec<u64> = match cfg.m {
        Some(m) => vec![m],
        None => (2..=30).collect(),
    };
    let mut report = LawReport::new("cyclotomic", 2, pmax);
    for m in ms {
        report.absorb(laws::verify_cyclotomic_split(m, pmax)?);
    }
    Ok(report.finish().into())
}

fn quad_residues(cfg: &RunConfig, _: &CoefficientCache) -> Result<LawOutput> {
    let pmax = cfg.pmax_or(100_000);
    let cases: Vec<(String, u64)> = match (&cfg.poly, cfg.modulus) {
        (Some(p), Some(d)) => vec![(p.clone(), d)],
        (None, None) => vec![
            ("T^2 + 1".into(), 4),
            ("T^2 - T - 1".into(), 5),
            ("T^2 - 11".into(), 44),
        ],
        _ => bail!("quad-residues needs both --poly and --modulus, or neither"),
    };
    let mut report = LawReport::new("quad-residues", 2, pmax);
    let mut csv = String::from("polynomial,modulus,residue,class\n");
    for (text, d) in cases {
        let f = IntPoly::parse(&text)?;
        let (set, r) = laws::discover_split_residues(&f, d, pmax)?;
        let classes = [
            ("split", &set.split),
            ("not-split", &set.inert),
            ("mixed", &set.mixed),
            ("undetermined", &set.undetermined),
        ];
        for (name, members) in classes {
            for r in members {
                csv.push_str(&format!("{f},{d},{r},{name}\n"));
            }
        }
        report.absorb(r);
    }
    Ok(LawOutput {
        report: report.finish(),
        csv: Some(csv),
    })
}

fn gf_quadratic(cfg: &RunConfig, _: &CoefficientCache) -> Result<LawOutput> {
    Ok(laws::verify_quadratic_gf(cfg.pmax_or(10_000))?.into())
}

fn cubic23(cfg: &RunConfig, _: &CoefficientCache) -> Result<LawOutput> {
    Ok(laws::verify_cubic23(cfg.pmax_or(10_000))?.into())
}

fn weight1(cfg: &RunConfig, _: &CoefficientCache) -> Result<LawOutput> {
    let f = IntPoly::parse(cfg.poly.as_deref().unwrap_or("T^3 + T - 1"))?;
    Ok(laws::verify_weight1_form(&f, cfg.pmax_or(1000))?.into())
}

fn gauss2(cfg: &RunConfig, _: &CoefficientCache) -> Result<LawOutput> {
    Ok(laws::verify_gauss_cubic2(cfg.pmax_or(10_000))?.into())
}

fn modularity(
    cfg: &RunConfig,
    cache: &CoefficientCache,
    e: WeierstrassCurve,
    default_pmax: u64,
) -> Result<LawOutput> {
    let pmax = cfg.pmax_or(default_pmax);
    let spec = eta_for(&e, None)?;
    let t = cfg.truncation.unwrap_or(pmax as usize + 1);
    let series = cached_eta(cache, &spec, t)?;
    let mut report = laws::verify_elliptic_modularity_with(&e, &series, pmax)?;
    report.note("eta", spec.to_string());
    Ok(report.into())
}

fn modularity_11(cfg: &RunConfig, cache: &CoefficientCache) -> Result<LawOutput> {
    modularity(cfg, cache, WeierstrassCurve::conductor_11(), 2000)
}

fn modularity_32(cfg: &RunConfig, cache: &CoefficientCache) -> Result<LawOutput> {
    modularity(cfg, cache, WeierstrassCurve::conductor_32(), 1000)
}

fn modularity_36(cfg: &RunConfig, cache: &CoefficientCache) -> Result<LawOutput> {
    modularity(cfg, cache, WeierstrassCurve::conductor_36(), 1000)
}

fn theta11(cfg: &RunConfig, cache: &CoefficientCache) -> Result<LawOutput> {
    let pmax = cfg.pmax_or(2000);
    let t = cfg.truncation.unwrap_or(pmax as usize + 1);
    let b = cached_theta(cache, "level11-b", &QuadForm::level11_b(), t)?;
    let c = cached_theta(cache, "level11-c", &QuadForm::level11_c(), t)?;
    let eta = cached_eta(cache, &EtaSpec::parse("1^2 11^2")?, t)?;
    Ok(laws::verify_theta_difference_level11_with(&b, &c, &eta, pmax)?.into())
}

fn hecke(cfg: &RunConfig, _: &CoefficientCache) -> Result<LawOutput> {
    let t = cfg.truncation.or(cfg.pmax.map(|p| p as usize + 1)).unwrap_or(2000);
    Ok(laws::verify_hecke_suite(t)?.into())
}

fn ramanujan(cfg: &RunConfig, _: &CoefficientCache) -> Result<LawOutput> {
    Ok(laws::verify_ramanujan(cfg.pmax_or(5000))?.into())
}

fn sato_tate(cfg: &RunConfig, _: &CoefficientCache) -> Result<LawOutput> {
    let pmax = cfg.pmax_or(100_000);
    let n = prime_count(pmax)?;
    let spec = SatoTateSpec {
        bins: cfg.bins,
        tolerance: cfg.tolerance.unwrap_or(0.05f64.max(1.63 / n.sqrt())),
        symmetry_tolerance: 0.05f64.max(2.58 / n.sqrt()),
    };
    let sources = match &cfg.curve {
        Some(text) if text == "delta" => vec![SatoTateSource::Delta],
        Some(text) => vec![SatoTateSource::Curve(WeierstrassCurve::parse(text)?)],
        None => vec![
            SatoTateSource::Curve(WeierstrassCurve::conductor_11()),
            SatoTateSource::Delta,
        ],
    };
    let mut report = LawReport::new("sato-tate", 2, pmax);
    let mut csv = String::new();
    for source in sources {
        let (hist, r) = laws::sato_tate_histogram(&source, pmax, &spec)?;
        if !csv.is_empty() {
            csv.push('\n');
        }
        csv.push_str(&format!("# {}\n", r.law_id));
        csv.push_str(&hist.to_csv());
        report.absorb(r);
    }
    Ok(LawOutput {
        report: report.finish(),
        csv: Some(csv),
    })
}

/// `pi(pmax)`; default tolerances widen to the 99% sampling band for short runs.
fn prime_count(pmax: u64) -> Result<f64> {
    Ok(sieve_primes(pmax)?.len() as f64)
}

fn chebotarev(cfg: &RunConfig, _: &CoefficientCache) -> Result<LawOutput> {
    let f = IntPoly::parse(cfg.poly.as_deref().unwrap_or("T^3 - T - 1"))?;
    if f != IntPoly::parse("T^3 - T - 1")? {
        bail!("expected proportions are known only for T^3 - T - 1");
    }
    let expected: BTreeMap<Vec<usize>, f64> =
        [(vec![3], 1.0 / 3.0), (vec![1, 2], 0.5), (vec![1, 1, 1], 1.0 / 6.0)]
            .into_iter()
            .collect();
    let pmax = cfg.pmax_or(100_000);
    let tol = cfg.tolerance.unwrap_or(0.02f64.max(1.29 / prime_count(pmax)?.sqrt()));
    Ok(laws::chebotarev_proportions(&f, pmax, &expected, tol)?.into())
}

fn torsion_split(cfg: &RunConfig, cache: &CoefficientCache) -> Result<LawOutput> {
    let e = curve(cfg)?;
    let spec = eta_for(&e, cfg.eta.as_deref())?;
    let pmax = cfg.pmax_or(200_000);
    let series = cached_eta(cache, &spec, pmax as usize + 1)?;
    let (scan, mut report) = laws::torsion_split_scan_with(&e, &series, cfg.l, pmax, 10_000)?;
    report.note("eta", spec.to_string());
    let mut csv = String::from("p,split\n");
    for p in &scan.candidates {
        csv.push_str(&format!("{p},{}\n", scan.split.contains(p)));
    }
    Ok(LawOutput {
        report,
        csv: Some(csv),
    })
}

fn mu_split(cfg: &RunConfig, _: &CoefficientCache) -> Result<LawOutput> {
    Ok(laws::mu_split_law(cfg.l, cfg.pmax_or(10_000))?.into())
}

fn l_compare(cfg: &RunConfig, cache: &CoefficientCache) -> Result<LawOutput> {
    let x = cfg.pmax_or(2000);
    let xs = x as usize;
    let mut report = LawReport::new("L-compare", 1, x);
    for q in [3u64, 5, 7, 23] {
        let artin = laws::artin_quadratic(q, x)?;
        let hecke = laws::legendre_character_series(q, xs + 1)?;
        let mut r = laws::compare_l_coefficients(&artin, &hecke, xs, &BTreeSet::from([q]))?;
        r.law_id = format!("quadratic[{q}]");
        report.absorb(r);
    }
    let e = curve(cfg)?;
    let spec = eta_for(&e, cfg.eta.as_deref())?;
    let series = cached_eta(cache, &spec, xs + 1)?;
    let artin = laws::artin_elliptic(&e, x);
    let excluded: BTreeSet<u64> = e.bad_primes().iter().copied().collect();
    let mut r = laws::compare_l_coefficients(&artin, &series, xs, &excluded)?;
    r.law_id = format!("elliptic[{e}]");
    report.absorb(r);
    Ok(report.finish().into())
}

fn eta12(cfg: &RunConfig, _: &CoefficientCache) -> Result<LawOutput> {
    let t = cfg.truncation.or(cfg.pmax.map(|p| p as usize + 1)).unwrap_or(1001);
    Ok(laws::verify_eta12_signed_theta(t)?.into())
}

fn modular_symmetry(cfg: &RunConfig, _: &CoefficientCache) -> Result<LawOutput> {
    Ok(laws::verify_functional_equations(cfg.tolerance.unwrap_or(1e-8))?.into())
}

/// Random triples of points on `E(F_p)` for random good primes `p <= pmax`:
/// `(P + Q) + R = P + (Q + R)` and `#E(F_p) P = O`.
fn group_law(cfg: &RunConfig, _: &CoefficientCache) -> Result<LawOutput> {
    let e = curve(cfg)?;
    let pmax = cfg.pmax_or(500);
    let primes: Vec<u64> = sieve_primes(pmax)?
        .iter()
        .filter(|&p| !e.is_bad(p))
        .collect();
    if primes.is_empty() {
        bail!("no good primes up to {pmax}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut report = LawReport::new(format!("group-law[{e}]"), 2, pmax);
    for _ in 0..20 {
        let p = *primes.choose(&mut rng).expect("nonempty");
        let reduced = e.reduce(p);
        let order = reduced.count_affine() + 1;
        let mut points = vec![CurvePoint::Infinity];
        reduced.for_each_point(|pt| {
            points.push(pt);
            true
        });
        for _ in 0..50 {
            let [a, b, c] = [0; 3].map(|_| points[rng.gen_range(0..points.len())]);
            let left = reduced.point_add(&reduced.point_add(&a, &b), &c);
            let right = reduced.point_add(&a, &reduced.point_add(&b, &c));
            report.check(p, &format!("{right:?}"), &format!("{left:?}"));
            let killed = reduced.scalar_mul(order, &a);
            report.check(p, &format!("{:?}", CurvePoint::Infinity), &format!("{killed:?}"));
        }
    }
    report.note("seed", cfg.seed);
    Ok(report.finish().into())
}
