//! Grid-world construction: rectangular cell grids with walls, silent move
//! and stay actions, and labeled service self-loops.

use crate::agent::{AgentModel, Label, ModelError, TransitionSystem};
use crate::sym::ServiceSet;
use std::collections::BTreeSet;

/// Wall segments and service placements of one agent's workspace.
///
/// Cells are addressed as `(x, y)` with `x` growing east and `y` growing
/// south. A wall segment blocks movement between two adjacent cells.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GridSpec {
    pub width: u16,
    pub height: u16,
    /// Normalized unordered pairs of adjacent cells separated by a wall.
    pub walls: BTreeSet<((u16, u16), (u16, u16))>,
    pub start: (u16, u16),
    /// Service self-loops: (cells, provided global service mask, action name).
    pub services: Vec<(Vec<(u16, u16)>, ServiceSet, String)>,
}

impl GridSpec {
    pub fn new(width: u16, height: u16, start: (u16, u16)) -> Self {
        Self {
            width,
            height,
            start,
            ..Default::default()
        }
    }

    pub fn add_wall(&mut self, a: (u16, u16), b: (u16, u16)) {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.walls.insert((a, b));
    }

    /// Parses a wall segment in the compact form used by scenario files:
    /// `v,x,y0-y1` blocks between `(x,y)` and `(x+1,y)` for `y0 <= y <= y1`;
    /// `h,y,x0-x1` blocks between `(x,y)` and `(x,y+1)` for `x0 <= x <= x1`.
    pub fn add_wall_segment(&mut self, text: &str) -> Result<(), String> {
        let parts: Vec<&str> = text.split(',').map(|p| p.trim()).collect();
        if parts.len() != 3 {
            return Err(format!("wall `{text}`: expected `v,x,y0-y1` or `h,y,x0-x1`"));
        }
        let fixed: u16 = parts[1]
            .parse()
            .map_err(|_| format!("wall `{text}`: bad coordinate"))?;
        let (lo, hi) = match parts[2].split_once('-') {
            Some((a, b)) => (
                a.parse::<u16>()
                    .map_err(|_| format!("wall `{text}`: bad range"))?,
                b.parse::<u16>()
                    .map_err(|_| format!("wall `{text}`: bad range"))?,
            ),
            None => {
                let v: u16 = parts[2]
                    .parse()
                    .map_err(|_| format!("wall `{text}`: bad range"))?;
                (v, v)
            }
        };
        for i in lo..=hi {
            match parts[0] {
                "v" => self.add_wall((fixed, i), (fixed + 1, i)),
                "h" => self.add_wall((i, fixed), (i, fixed + 1)),
                other => return Err(format!("wall `{text}`: unknown kind `{other}`")),
            }
        }
        Ok(())
    }

    pub fn blocked(&self, a: (u16, u16), b: (u16, u16)) -> bool {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.walls.contains(&(a, b))
    }

    pub fn cell_index(&self, (x, y): (u16, u16)) -> u32 {
        y as u32 * self.width as u32 + x as u32
    }

    pub fn cell_name(&self, (x, y): (u16, u16)) -> String {
        format!("c{x}_{y}")
    }
}

/// Builds the agent model for a grid workspace: one state per cell, the
/// four silent moves where not wall-separated, a silent `stay` loop per
/// cell, and one labeled self-loop action per declared service set.
pub fn build_grid_world(id: usize, spec: &GridSpec) -> Result<AgentModel, ModelError> {
    let (w, h) = (spec.width, spec.height);
    assert!(w > 0 && h > 0, "grid must be nonempty");
    let names = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .map(|c| spec.cell_name(c))
        .collect();
    let mut ts = TransitionSystem::new(names, spec.cell_index(spec.start));

    let north = ts.add_action("north", Label::Silent);
    let south = ts.add_action("south", Label::Silent);
    let east = ts.add_action("east", Label::Silent);
    let west = ts.add_action("west", Label::Silent);
    let stay = ts.add_action("stay", Label::Silent);

    for y in 0..h {
        for x in 0..w {
            let here = (x, y);
            let s = spec.cell_index(here);
            ts.add_transition(s, stay, s).expect("fresh state");
            if y > 0 && !spec.blocked(here, (x, y - 1)) {
                ts.add_transition(s, north, spec.cell_index((x, y - 1)))
                    .expect("fresh state");
            }
            if y + 1 < h && !spec.blocked(here, (x, y + 1)) {
                ts.add_transition(s, south, spec.cell_index((x, y + 1)))
                    .expect("fresh state");
            }
            if x + 1 < w && !spec.blocked(here, (x + 1, y)) {
                ts.add_transition(s, east, spec.cell_index((x + 1, y)))
                    .expect("fresh state");
            }
            if x > 0 && !spec.blocked(here, (x - 1, y)) {
                ts.add_transition(s, west, spec.cell_index((x - 1, y)))
                    .expect("fresh state");
            }
        }
    }

    let mut services = 0u64;
    for (cells, mask, name) in &spec.services {
        let a = ts.add_action(name.clone(), Label::Provide(*mask));
        for &c in cells {
            let s = spec.cell_index(c);
            ts.add_transition(s, a, s).map_err(|_| ModelError::NonDeterminism {
                agent: id,
                state: spec.cell_name(c),
                action: name.clone(),
            })?;
        }
        services |= mask;
    }

    let model = AgentModel { id, ts, services };
    model.validate()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cell_strip() {
        let spec = GridSpec::new(2, 1, (0, 0));
        let m = build_grid_world(1, &spec).unwrap();
        assert_eq!(m.ts.n_states(), 2);
        // two moves (east from c0, west from c1) and two stay loops
        let moves: usize = (0..2)
            .map(|s| {
                m.ts.outgoing(s)
                    .iter()
                    .filter(|&&(a, t)| t != s && m.ts.action(a).label.is_silent())
                    .count()
            })
            .sum();
        assert_eq!(moves, 2);
        for s in 0..2 {
            assert!(m
                .ts
                .outgoing(s)
                .iter()
                .any(|&(a, t)| t == s && m.ts.action(a).label.is_silent()));
        }
    }

    #[test]
    fn wall_blocks_both_directions_and_counts_match() {
        let mut spec = GridSpec::new(3, 3, (0, 0));
        spec.add_wall_segment("v,0,0-2").unwrap(); // wall column between x=0 and x=1
        spec.add_wall_segment("h,0,1-1").unwrap(); // one horizontal gap blocked
        let err = build_grid_world(1, &spec);
        // column 0 is fully cut off: mutual reachability fails
        assert!(matches!(err, Err(ModelError::Unreachable { .. })));

        let mut spec = GridSpec::new(3, 3, (0, 0));
        spec.add_wall_segment("v,0,0-1").unwrap(); // leave (0,2)-(1,2) open
        let m = build_grid_world(1, &spec).unwrap();
        // non-self-loop transitions = 2 * adjacent non-walled pairs
        let adjacent_open = {
            let mut n = 0;
            for y in 0..3u16 {
                for x in 0..3u16 {
                    if x + 1 < 3 && !spec.blocked((x, y), (x + 1, y)) {
                        n += 1;
                    }
                    if y + 1 < 3 && !spec.blocked((x, y), (x, y + 1)) {
                        n += 1;
                    }
                }
            }
            n
        };
        let moves: usize = (0..9)
            .map(|s| {
                m.ts.outgoing(s)
                    .iter()
                    .filter(|&&(_, t)| t != s)
                    .count()
            })
            .sum();
        assert_eq!(moves, 2 * adjacent_open);
    }

    #[test]
    fn service_loops_attach_to_their_cells() {
        let mut spec = GridSpec::new(2, 2, (0, 0));
        spec.services
            .push((vec![(1, 1)], 0b10, "svc_snap".into()));
        let m = build_grid_world(3, &spec).unwrap();
        let a = m.ts.action_named("svc_snap").unwrap();
        assert_eq!(m.ts.states_with_action(a), vec![spec.cell_index((1, 1))]);
        assert_eq!(m.services, 0b10);
    }

    #[test]
    fn full_square_has_cell_count() {
        let spec = GridSpec::new(12, 12, (0, 0));
        let m = build_grid_world(1, &spec).unwrap();
        assert_eq!(m.ts.n_states(), 144);
    }
}
