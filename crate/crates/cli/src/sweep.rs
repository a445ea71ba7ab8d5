//! `sweep` — grid experiments behind the heatmaps, one CSV each.

use std::process::ExitCode;

use bribesim_core::attacks::reorg_agreement_grid;
use bribesim_core::attacks::scenario::{CommitteeSpec, WeightMode};
use bribesim_core::crypto::mock::MockSuite;
use bribesim_core::econ::{
    cost_sweep, exit_bribe_sweep, exit_duration_sweep, linspace, solve_exit_game, GameParams,
    HeatmapCell, QUOTED_ANNUAL_EXOGENOUS_PROFIT_ETH,
};
use bribesim_core::types::{weight, Weight};

use crate::output::{csv_from_cells, write_text};
use crate::{CliError, Ctx, Experiment};

fn ratio_to_f64(w: &Weight) -> f64 {
    *w.numer() as f64 / *w.denom() as f64
}

pub fn run(ctx: &Ctx, experiment: Experiment) -> Result<ExitCode, CliError> {
    let cells = match experiment {
        Experiment::ExpostCost => expost_cost_cells(ctx),
        Experiment::ExitBribe | Experiment::ExitDuration => exit_game_cells(ctx, experiment),
        Experiment::ReorgAgreement => reorg_agreement_cells(ctx)?,
    };

    let path = ctx.out.join(format!("{}.csv", experiment.file_stem()));
    write_text(&path, &csv_from_cells(&cells))?;
    println!("wrote {} ({} rows)", path.display(), cells.len());
    Ok(ExitCode::SUCCESS)
}

/// Committee-bribery cost of a one-block fork in ETH over α ∈ [0, 1/2],
/// β ∈ [0, 1].
fn expost_cost_cells(ctx: &Ctx) -> Vec<HeatmapCell> {
    let grid = &ctx.config.grid;
    let snapshot = &ctx.config.snapshot;
    let alphas = linspace(0.0, 0.5, grid.analytic_points);
    let betas = linspace(0.0, 1.0, grid.analytic_points);
    let cells = cost_sweep(
        snapshot.validators,
        snapshot.stake_eth(&ctx.config.economics),
        &alphas,
        &betas,
        grid.proposer_boost,
    );

    let feasible = cells.iter().filter(|c| c.feasible).count();
    let max_feasible = cells
        .iter()
        .filter(|c| c.feasible)
        .map(|c| c.value)
        .fold(0.0f64, f64::max);
    println!(
        "{}: {} of {} cells feasible, dearest feasible committee costs {max_feasible} ETH",
        snapshot.label,
        feasible,
        cells.len(),
    );
    cells
}

/// Exit-campaign cost (USD) or queue duration (days) over α, α* ∈ [0, 1/2].
fn exit_game_cells(ctx: &Ctx, experiment: Experiment) -> Vec<HeatmapCell> {
    let economics = &ctx.config.economics;
    let game = &ctx.config.game;
    let total = ctx.config.snapshot.validators;
    let points = ctx.config.grid.analytic_points;
    let alphas = linspace(0.0, 0.5, points);
    let stars = linspace(0.0, 0.5, points);

    let cells = match experiment {
        Experiment::ExitBribe => {
            exit_bribe_sweep(economics, total, game.rational_fraction, &alphas, &stars)
        }
        Experiment::ExitDuration => {
            exit_duration_sweep(economics, total, game.rational_fraction, &alphas, &stars)
        }
        _ => unreachable!("only exit experiments route here"),
    };

    // Headline solution at the configured shares, for orientation.
    let params = GameParams {
        total_validators: total,
        briber_share: game.briber_share,
        target_share: game.target_share,
        rational_fraction: game.rational_fraction,
    };
    match solve_exit_game(economics, &params) {
        Ok(solved) => {
            println!(
                "at alpha={} alpha*={}: {} exits, {} per validator ({}), {} days of exit queue",
                game.briber_share,
                game.target_share,
                solved.required_exits,
                solved.bribe,
                solved.bribe_usd,
                solved.duration_days,
            );
            println!(
                "campaign cost {}, computed break-even exogenous profit {} \
                 (externally quoted annual threshold: {QUOTED_ANNUAL_EXOGENOUS_PROFIT_ETH} ETH/year)",
                solved.bribe_cost, solved.break_even_exogenous,
            );
        }
        Err(e) => println!("no equilibrium at the configured shares: {e}"),
    }
    cells
}

/// Simulated-reorg agreement with the closed-form predicates over the
/// stake grid, both attack families, run lengths 1–3.
fn reorg_agreement_cells(ctx: &Ctx) -> Result<Vec<HeatmapCell>, CliError> {
    let points = ctx.config.grid.simulation_points;
    let alphas: Vec<Weight> = (0..points)
        .map(|i| weight(i as i128, 2 * (points - 1) as i128))
        .collect();
    let betas: Vec<Weight> = (0..points)
        .map(|j| weight(j as i128, (points - 1) as i128))
        .collect();
    let shapes: Vec<(u64, u64)> = (1..=3)
        .flat_map(|h| (1..=3).map(move |a| (h, a)))
        .collect();
    let committee = CommitteeSpec {
        size: ctx.config.grid.committee_size,
        mode: WeightMode::ExactFractions,
    };

    let grid = reorg_agreement_grid::<MockSuite>(&alphas, &betas, &shapes, &committee)?;
    let runs_per_cell = shapes.len() * 2;
    let mut agreed_total = 0usize;
    let mut exact_total = 0usize;
    let cells: Vec<HeatmapCell> = grid
        .chunks(runs_per_cell)
        .map(|runs| {
            let agreed = runs.iter().filter(|r| r.predicted == r.simulated).count();
            let exact = runs.iter().filter(|r| r.weights_exact).count();
            agreed_total += agreed;
            exact_total += exact;
            HeatmapCell {
                alpha: ratio_to_f64(&runs[0].alpha),
                beta_or_alpha_star: ratio_to_f64(&runs[0].beta),
                value: agreed as f64 / runs_per_cell as f64,
                feasible: runs.iter().any(|r| r.predicted),
            }
        })
        .collect();
    println!(
        "simulation agreed with the predicates in {agreed_total}/{} runs; \
         decision weights exact in {exact_total}/{}",
        grid.len(),
        grid.len(),
    );
    Ok(cells)
}
