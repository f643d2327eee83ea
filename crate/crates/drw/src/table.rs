//! Plain-text summary tables in the layout `(M,d) | Solved | Iterations |
//! Time | S(φ)`.

use drw_core::solver::{BatchSummary, MeanMax};

pub struct Row<'a> {
    pub m: usize,
    pub d: usize,
    pub summary: &'a BatchSummary,
}

fn mean_max(v: Option<MeanMax>, precision: usize) -> String {
    match v {
        Some(MeanMax { mean, max }) => format!("{mean:.precision$} ({max:.precision$})"),
        None => "-".into(),
    }
}

/// `with_separability` adds the `S(φ)` column used for 2D runs.
pub fn render(rows: &[Row], with_separability: bool) -> String {
    let mut header = vec![
        "(M,d)".to_string(),
        "Solved".into(),
        "Iterations mean (max)".into(),
        "Time mean (max)".into(),
    ];
    if with_separability {
        header.push("S(φ) mean (max)".into());
    }
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let s = r.summary;
            let mut cells = vec![
                format!("({},{})", r.m, r.d),
                format!("{}/{}", s.solved, s.replications),
                mean_max(s.iterations, 1),
                mean_max(s.wall_time, 2),
            ];
            if with_separability {
                cells.push(mean_max(s.separability, 3));
            }
            cells
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            std::iter::once(&header[c])
                .chain(body.iter().map(|r| &r[c]))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        format!("{}\n", padded.join(" | ").trim_end())
    };
    let mut out = line(&header);
    let rule: usize = widths.iter().sum::<usize>() + 3 * (widths.len() - 1);
    out.push_str(&"-".repeat(rule));
    out.push('\n');
    for r in &body {
        out.push_str(&line(r));
    }
    out
}

/// `(M, d)` rows of the 1D and 2D experiment tables.
pub fn preset(table: u8) -> Option<(usize, &'static [(usize, usize)])> {
    match table {
        1 => Some((1, &[(4, 1), (6, 2), (8, 3), (10, 4), (12, 5), (14, 6)])),
        2 => Some((2, &[(4, 1), (6, 2)])),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use drw_core::solver::BatchSummary;

    #[test]
    fn layout() {
        let s = BatchSummary {
            replications: 10,
            solved: 9,
            solved_bownik: 9,
            iterations: Some(MeanMax {
                mean: 122.2,
                max: 162.0,
            }),
            wall_time: Some(MeanMax { mean: 0.1, max: 0.2 }),
            separability: Some(MeanMax {
                mean: 0.209,
                max: 0.25,
            }),
            runs: vec![],
        };
        let text = render(
            &[Row {
                m: 4,
                d: 1,
                summary: &s,
            }],
            true,
        );
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("(M,d) | Solved | Iterations mean (max)"));
        assert!(lines[0].ends_with("S(φ) mean (max)"));
        assert!(lines[2].contains("9/10"));
        assert!(lines[2].contains("122.2 (162.0)"));
        assert!(lines[2].contains("0.209 (0.250)"));
        assert!(!render(
            &[Row {
                m: 4,
                d: 1,
                summary: &s
            }],
            false
        )
        .contains("S(φ)"));
    }

    #[test]
    fn presets() {
        assert_eq!(preset(1).unwrap().1.len(), 6);
        assert_eq!(preset(2).unwrap(), (2, &[(4, 1), (6, 2)][..]));
        assert!(preset(3).is_none());
    }
}
