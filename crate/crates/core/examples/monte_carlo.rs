//! Seeded Monte-Carlo estimates of event probabilities at large sizes.

use andor::combinatorics::Schedule;
use andor::sampler::{estimates_csv, sweep, Event, RunSettings, SamplerState};

fn main() -> andor::Result<()> {
    let events = Event::parse_list("satisfiable,is_simple_tautology,matches_key(E1:2)")?;
    let state = SamplerState::new(7, 0);
    let rows = sweep(&[32, 64, 128], &Schedule::Identity, &events, 20_000, &state, &RunSettings::default())?;
    print!("{}", estimates_csv(&rows));
    Ok(())
}
