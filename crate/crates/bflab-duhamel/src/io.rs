//! CSV export for space-time trajectories.

use std::io::Write;

use bflab_spectral::SpaceTimeField;

/// One row per (time, node): `t,x_index,value` with full-precision reals.
pub fn write_trajectory_csv<W: Write>(
    u: &SpaceTimeField,
    out: &mut W,
) -> std::io::Result<()> {
    writeln!(out, "t,x_index,value")?;
    for (j, &t) in u.times().iter().enumerate() {
        let slice = u.slice(j);
        for (idx, value) in slice.samples().iter().enumerate() {
            writeln!(out, "{t:.16e},{idx},{value:.16e}")?;
        }
    }
    Ok(())
}
