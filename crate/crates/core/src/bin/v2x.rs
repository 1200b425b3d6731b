use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use v2x_core::clearing::{Auction, ClearingConfig, Method, DEFAULT_ORACLE_CAP, DEFAULT_STATE_BUDGET};
use v2x_core::fr::{fr_tick, PeakLedger, QuoteContext};
use v2x_core::io::{emit_report, load_prices, load_scenario, Format};
use v2x_core::model::{Market, Money};
use v2x_core::reliability::{ActiveSet, SupplyDistribution, SupplyPoint, ZeroFinePolicy};
use v2x_core::sim::{run_scenario, sweep, RunOptions, Scenario, SWEEP_AXES};
use v2x_core::vcg::payment_schedule;

#[derive(Parser)]
#[command(name = "v2x", version, about = "Day-ahead V2X export auction engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file and its contract book.
    Validate(Common),
    /// Winner determination: accepted contracts and social savings.
    Clear(Common),
    /// VCG payment schedule.
    Pay(Common),
    /// Approximate supply distribution per hhp with accepted contracts.
    Reliability(Common),
    /// Frequency-regulation quotes for the EVs plugged in at one hhp.
    FrQuote {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        hhp: usize,
    },
    /// Full seeded run.
    Simulate(Common),
    /// One run per value of a scenario parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        axis: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        values: Vec<f64>,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Human,
    Machine,
}

#[derive(Args)]
struct Common {
    /// Scenario TOML file.
    scenario: PathBuf,
    /// Override the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "human")]
    format: FormatArg,
    /// Clear by exhaustive enumeration instead of the DP.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
    state_budget: u64,
    /// Price CSV replacing the scenario's prices for every market it contains.
    #[arg(long)]
    prices: Option<PathBuf>,
}

struct Failure(String);

fn stage<E: Display>(tag: &'static str) -> impl Fn(E) -> Failure {
    move |e| {
        let msg = e.to_string();
        if msg.starts_with('[') {
            Failure(msg)
        } else {
            Failure(format!("[{tag}] {msg}"))
        }
    }
}

impl Common {
    fn load(&self) -> Result<Scenario, Failure> {
        let mut s = load_scenario(&self.scenario).map_err(stage("load"))?;
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(path) = &self.prices {
            for (market, v) in load_prices(path, s.hhp_count).map_err(stage("load"))? {
                match market {
                    Market::DayAhead => s.prices.day_ahead = v.per_hhp,
                    Market::Balancing => s.prices.balancing = v.per_hhp,
                    Market::IntraDay => s.prices.intra_day = Some(v.per_hhp),
                }
            }
        }
        s.validate().map_err(stage("validate"))?;
        Ok(s)
    }

    fn options(&self) -> RunOptions {
        RunOptions {
            method: if self.oracle { Method::Oracle } else { Method::Dp },
            clearing: ClearingConfig { state_budget: self.state_budget, oracle_cap: DEFAULT_ORACLE_CAP },
        }
    }

    fn machine(&self) -> bool {
        self.format == FormatArg::Machine
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn ids<T: Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

#[derive(Serialize)]
struct HhpReliability {
    hhp: usize,
    demand: u64,
    distribution: SupplyDistribution,
    points: Vec<SupplyPoint>,
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Validate(c) => {
            let s = c.load()?;
            let book = s.book().map_err(stage("validate"))?;
            if c.machine() {
                #[derive(Serialize)]
                struct Summary {
                    ok: bool,
                    fleets: usize,
                    bundles: usize,
                    contracts: usize,
                    evs: usize,
                }
                Ok(json(&Summary {
                    ok: true,
                    fleets: s.fleets.len(),
                    bundles: book.bundles().len(),
                    contracts: book.contracts().len(),
                    evs: s.evs.len(),
                }))
            } else {
                Ok(format!(
                    "ok: {} fleets, {} bundles, {} contracts, {} EVs\n",
                    s.fleets.len(),
                    book.bundles().len(),
                    book.contracts().len(),
                    s.evs.len()
                ))
            }
        }
        Command::Clear(c) => {
            let s = c.load()?;
            let (timeline, book, demand, prices) = parts(&s)?;
            let auction = auction(&c, &timeline, &demand, &prices);
            let a = auction.clear(&book).map_err(stage("clear"))?;
            if c.machine() {
                Ok(json(&a))
            } else {
                Ok(format!("accepted       {}\nsocial savings {} p\n", ids(&a.accepted), a.value))
            }
        }
        Command::Pay(c) => {
            let s = c.load()?;
            let (timeline, book, demand, prices) = parts(&s)?;
            let sched = payment_schedule(&auction(&c, &timeline, &demand, &prices), &book).map_err(stage("pay"))?;
            if c.machine() {
                return Ok(json(&sched));
            }
            let mut out = format!("accepted       {}\nsocial savings {} p\n\n", ids(&sched.allocation.accepted), sched.allocation.value);
            out += &format!("{:<8} {:>12}\n", "fleet", "payment");
            for (f, p) in &sched.payments {
                out += &format!("{:<8} {:>12}\n", f.to_string(), p.to_string());
            }
            out += &format!("{:<8} {:>12}\n", "total", sched.total().to_string());
            Ok(out)
        }
        Command::Reliability(c) => {
            let s = c.load()?;
            let (timeline, book, demand, prices) = parts(&s)?;
            let a = auction(&c, &timeline, &demand, &prices).clear(&book).map_err(stage("clear"))?;
            let active = ActiveSet::from_allocation(&a, &book, ZeroFinePolicy::AssumeZero).map_err(stage("reliability"))?;
            let mut rows = Vec::new();
            for &h in active.by_hhp().keys() {
                let d = SupplyDistribution::build(&active, h).map_err(stage("reliability"))?;
                let points = d.against_demand(demand[h]);
                rows.push(HhpReliability { hhp: h, demand: demand[h].kwh(), distribution: d, points });
            }
            if c.machine() {
                return Ok(json(&rows));
            }
            let mut out = String::new();
            for r in &rows {
                let d = &r.distribution;
                out += &format!(
                    "hhp {}  demand {} kWh  mean size {:.3}  mean p {:.4}  max {}\n",
                    r.hhp, r.demand, d.mean_size, d.mean_prob, d.x_max
                );
                out += &format!("  {:>10} {:>12} {:>10} {:>10}\n", "supply", "probability", "deficit", "excess");
                for p in &r.points {
                    out += &format!("  {:>10.3} {:>12.6} {:>10.3} {:>10.3}\n", p.supply, p.probability, p.deficit, p.excess);
                }
            }
            Ok(out)
        }
        Command::FrQuote { common: c, hhp } => {
            let s = c.load()?;
            if hhp >= s.hhp_count {
                return Err(Failure(format!("[fr-quote] hhp {hhp} outside 0..{}", s.hhp_count)));
            }
            let (timeline, book, demand, prices) = parts(&s)?;
            let a = auction(&c, &timeline, &demand, &prices).clear(&book).map_err(stage("clear"))?;
            let active = ActiveSet::from_allocation(&a, &book, ZeroFinePolicy::AssumeZero).map_err(stage("reliability"))?;
            let dist = if active.at_hhp(hhp).is_empty() {
                None
            } else {
                Some(SupplyDistribution::build(&active, hhp).map_err(stage("reliability"))?)
            };
            let balancing = s.prices(Market::Balancing).expect("validated");
            let block = timeline.block_of(hhp).expect("in range").hhps.clone();
            let ctx = QuoteContext {
                hhp,
                block: &block,
                supply: dist.as_ref(),
                demand: demand[hhp],
                balancing_price: balancing.at(hhp),
                day_ahead_price: prices.at(hhp),
            };
            let mut evs = s.initial_evs();
            for ev in evs.iter_mut() {
                ev.plugged = s.evs.iter().any(|e| e.id == ev.ev_id && e.plugged.contains(&hhp));
            }
            // Imbalance assuming every accepted contract delivers.
            let imbalance = demand[hhp].kwh() as i64 - a.per_hhp_supply[hhp].kwh() as i64 + s.imbalance_at(hhp);
            let tick = fr_tick(&ctx, &mut evs, imbalance, &mut PeakLedger::default(), &s.fr);
            if c.machine() {
                return Ok(json(&tick));
            }
            let mut out = format!("hhp {hhp}  imbalance {imbalance} kWh  residual {} kWh\n", tick.dispatch.residual);
            out += &format!("{:<6} {:>9} {:>12} {:>12} {:>12} {:>12}\n", "ev", "dispatch", "export", "import", "delivery", "payment");
            let mut total = Money::ZERO;
            for q in &tick.quotes {
                total += q.payment;
                out += &format!(
                    "{:<6} {:>9} {:>12} {:>12} {:>12} {:>12}\n",
                    q.ev_id.to_string(),
                    tick.dispatch.of(q.ev_id),
                    q.export_term.to_string(),
                    q.import_term.to_string(),
                    q.delivery_term.to_string(),
                    q.payment.to_string()
                );
            }
            out += &format!("total payment {total} p\n");
            Ok(out)
        }
        Command::Simulate(c) => {
            let s = c.load()?;
            let settlement = run_scenario(&s, &c.options()).map_err(stage("simulate"))?;
            let format = if c.machine() { Format::Machine } else { Format::Human };
            Ok(String::from_utf8(emit_report(&settlement, format)).expect("utf-8 report"))
        }
        Command::Sweep { common: c, axis, values } => {
            if !SWEEP_AXES.contains(&axis.as_str()) {
                return Err(Failure(format!("[sweep] unknown axis {axis:?}; expected one of {}", SWEEP_AXES.join(", "))));
            }
            let s = c.load()?;
            let rows = sweep(&s, &axis, &values, &c.options()).map_err(stage("sweep"))?;
            if c.machine() {
                return Ok(json(&rows));
            }
            let mut out = format!(
                "{:>12} {:>14} {:>14} {:>12} {:>10} {:>10} {:>12}\n",
                axis, "platform", "payments", "fr paid", "unmet", "balancing", "carbon g"
            );
            for r in &rows {
                let k = &r.kpis;
                out += &format!(
                    "{:>12} {:>14} {:>14} {:>12} {:>10} {:>10} {:>12.1}\n",
                    r.value,
                    k.platform_utility.to_string(),
                    k.total_payments.to_string(),
                    k.fr_payments.to_string(),
                    k.unmet_demand_kwh,
                    k.balancing_kwh,
                    k.carbon_g
                );
            }
            Ok(out)
        }
    }
}

type Parts = (
    v2x_core::model::Timeline,
    v2x_core::model::ContractBook,
    Vec<v2x_core::model::EnergyQty>,
    v2x_core::model::PriceVector,
);

fn parts(s: &Scenario) -> Result<Parts, Failure> {
    let timeline = s.timeline().map_err(stage("validate"))?;
    let book = s.book().map_err(stage("validate"))?;
    let prices = s.prices(Market::DayAhead).expect("validated");
    Ok((timeline, book, s.adjusted_demand(), prices))
}

fn auction<'a>(
    c: &Common,
    timeline: &'a v2x_core::model::Timeline,
    demand: &'a [v2x_core::model::EnergyQty],
    prices: &'a v2x_core::model::PriceVector,
) -> Auction<'a> {
    let o = c.options();
    Auction { timeline, demand, prices, config: o.clearing, method: o.method }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure(msg)) => {
            eprintln!("v2x: {msg}");
            ExitCode::from(2)
        }
    }
}
