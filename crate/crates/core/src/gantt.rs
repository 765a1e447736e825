//! Per-crane timelines of a solution as plain text or SVG.

use std::fmt::Write as _;

use crate::instance::{Instance, Time};
use crate::solution::Solution;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lane {
    pub label: String,
    /// `(shipment, start, end)` in sequence order.
    pub tasks: Vec<(usize, Time, Time)>,
}

pub fn lanes(instance: &Instance, solution: &Solution) -> Vec<Lane> {
    let ships = instance.shipments();
    let mut out = Vec::new();
    for (q0, seq) in solution.qc_sequences.iter().enumerate() {
        out.push(Lane {
            label: format!("QC {}", q0 + 1),
            tasks: seq
                .iter()
                .map(|&i| {
                    (
                        i,
                        solution.starts.qc[i],
                        solution.starts.qc[i] + ships[i].qc_time,
                    )
                })
                .collect(),
        });
    }
    for (c, seq) in solution.yc_sequences.iter().enumerate() {
        out.push(Lane {
            label: format!("YC {c}"),
            tasks: seq
                .iter()
                .map(|&i| {
                    (
                        i,
                        solution.starts.yc[i],
                        solution.starts.yc[i] + ships[i].yc_time,
                    )
                })
                .collect(),
        });
    }
    out
}

fn horizon(lanes: &[Lane]) -> Time {
    lanes
        .iter()
        .flat_map(|l| l.tasks.iter().map(|t| t.2))
        .max()
        .unwrap_or(0)
        .max(1)
}

fn glyph(shipment: usize) -> char {
    const GLYPHS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
    GLYPHS[shipment % GLYPHS.len()] as char
}

/// One bar line per crane, `width` columns wide, followed by the task list.
pub fn render_text(instance: &Instance, solution: &Solution, width: usize) -> String {
    let lanes = lanes(instance, solution);
    let end = horizon(&lanes);
    let width = width.max(10);
    let col = |t: Time| (t as usize * width) / end as usize;
    let mut out = String::new();
    writeln!(out, "objective {}  horizon {end}", solution.objective).expect("write");
    for lane in &lanes {
        let mut bar = vec!['.'; width];
        for &(i, s, e) in &lane.tasks {
            let (a, b) = (col(s), col(e).max(col(s) + 1).min(width));
            bar[a..b].iter_mut().for_each(|c| *c = glyph(i));
        }
        let list: Vec<String> = lane
            .tasks
            .iter()
            .map(|(i, s, e)| format!("{i}[{s},{e})"))
            .collect();
        writeln!(
            out,
            "{:<5} |{}| {}",
            lane.label,
            bar.iter().collect::<String>(),
            list.join(" ")
        )
        .expect("write");
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn render_svg(instance: &Instance, solution: &Solution) -> String {
    const LEFT: f64 = 60.0;
    const PLOT: f64 = 840.0;
    const ROW: f64 = 28.0;
    let lanes = lanes(instance, solution);
    let end = horizon(&lanes);
    let scale = PLOT / end as f64;
    let height = ROW * (lanes.len() as f64 + 1.0) + 10.0;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{height}" font-family="monospace" font-size="11">"#,
        LEFT + PLOT + 20.0
    )
    .expect("write");
    for (row, lane) in lanes.iter().enumerate() {
        let y = ROW * row as f64 + 5.0;
        writeln!(
            out,
            r#"  <text x="4" y="{}">{}</text>"#,
            y + 17.0,
            escape(&lane.label)
        )
        .expect("write");
        for &(i, s, e) in &lane.tasks {
            let x = LEFT + s as f64 * scale;
            let w = ((e - s) as f64 * scale).max(1.0);
            let hue = (i * 47) % 360;
            writeln!(
                out,
                r#"  <rect x="{x:.1}" y="{y}" width="{w:.1}" height="{}" fill="hsl({hue},60%,70%)" stroke="black"><title>shipment {i}: [{s}, {e})</title></rect>"#,
                ROW - 6.0
            )
            .expect("write");
            writeln!(
                out,
                r#"  <text x="{:.1}" y="{}">{i}</text>"#,
                x + 3.0,
                y + 16.0
            )
            .expect("write");
        }
    }
    let axis_y = ROW * lanes.len() as f64 + 18.0;
    writeln!(
        out,
        r#"  <text x="{LEFT}" y="{axis_y}">0</text><text x="{:.1}" y="{axis_y}" text-anchor="end">{end}</text>"#,
        LEFT + PLOT
    )
    .expect("write");
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::InstanceBuilder;
    use crate::derived::DerivedTables;
    use crate::oracle::brute_force;

    #[test]
    fn renders_every_task() {
        let mut b = InstanceBuilder::new(4, 2, 2);
        b.inbound_location(1, 5);
        b.inbound(0, 1, 8, 4);
        b.outbound(0, 4, 6, 5, 0, 3);
        let inst = b.build().unwrap();
        let der = DerivedTables::build(&inst).unwrap();
        let sol = brute_force(&inst, &der, 1000).unwrap().best_solution;
        let text = render_text(&inst, &sol, 40);
        assert_eq!(text.lines().count(), 1 + 2 + 2);
        assert!(text.contains("0[0,8)"));
        let svg = render_svg(&inst, &sol);
        assert_eq!(svg.matches("<rect").count(), 4);
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
