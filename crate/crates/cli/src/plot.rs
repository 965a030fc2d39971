//! Pictures of two-dimensional solved regions: `P` for P-positions, `.` for
//! N-positions, `D` for defeated ones, blank outside the region. The first
//! coordinate runs left to right and the second bottom to top.

use std::fmt::Write;

use latgame::{Label, SolvedRegion};

fn bounds(region: &SolvedRegion) -> Option<(i64, i64, i64, i64)> {
    let mut it = region.iter().map(|(p, _)| (p[0], p[1]));
    let (x, y) = it.next()?;
    Some(it.fold((x, x, y, y), |(x0, x1, y0, y1), (x, y)| (x0.min(x), x1.max(x), y0.min(y), y1.max(y))))
}

fn glyph(label: Label) -> char {
    match label {
        Label::P => 'P',
        Label::N => '.',
        Label::D => 'D',
    }
}

pub fn text_grid(region: &SolvedRegion) -> String {
    let Some((x0, x1, y0, y1)) = bounds(region) else {
        return String::new();
    };
    let mut out = String::new();
    for y in (y0..=y1).rev() {
        let row: String = (x0..=x1)
            .map(|x| region.label(&[x, y]).map_or(' ', glyph))
            .collect();
        out.push_str(row.trim_end());
        out.push('\n');
    }
    out
}

const CELL: i64 = 16;

pub fn svg(region: &SolvedRegion) -> String {
    let (x0, x1, y0, y1) = bounds(region).unwrap_or((0, 0, 0, 0));
    let w = (x1 - x0 + 1) * CELL;
    let h = (y1 - y0 + 1) * CELL;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    for (p, label) in region.iter() {
        let (fill, class) = match label {
            Label::P => ("#1f6feb", "P"),
            Label::N => ("#eaeef2", "N"),
            Label::D => ("#cf222e", "D"),
        };
        let x = (p[0] - x0) * CELL;
        let y = (y1 - p[1]) * CELL;
        let _ = writeln!(
            out,
            r#"  <rect class="{class}" x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="white"><title>({}, {}) {class}</title></rect>"#,
            p[0], p[1]
        );
    }
    out.push_str("</svg>\n");
    out
}
