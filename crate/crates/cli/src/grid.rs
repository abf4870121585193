//! Tensor grids and canonical CSV.

use crate::CliError;

/// One axis, `start:stop:count`.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + step * i as f64).collect()
    }
}

/// Parse `start:stop:count` axes separated by `;`. A single axis is used for
/// every coordinate.
pub fn parse_grid(spec: &str, n: usize) -> Result<Vec<Axis>, CliError> {
    let mut axes = Vec::new();
    for part in spec.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let fields: Vec<&str> = part.split(':').collect();
        if fields.len() != 3 {
            return Err(CliError::Usage(format!("grid axis `{part}` is not start:stop:count")));
        }
        let bad = || CliError::Usage(format!("grid axis `{part}` is not start:stop:count"));
        let start: f64 = fields[0].trim().parse().map_err(|_| bad())?;
        let stop: f64 = fields[1].trim().parse().map_err(|_| bad())?;
        let count: usize = fields[2].trim().parse().map_err(|_| bad())?;
        if count == 0 || !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        axes.push(Axis { start, stop, count });
    }
    match axes.len() {
        0 => Err(CliError::Usage("empty grid".into())),
        1 => Ok(vec![axes[0].clone(); n]),
        m if m == n => Ok(axes),
        m => Err(CliError::Usage(format!("grid has {m} axes but n = {n}"))),
    }
}

/// Grid points in row-major order (last coordinate fastest).
pub fn tensor_points(axes: &[Axis]) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in axes {
        let pts = axis.points();
        rows = rows
            .into_iter()
            .flat_map(|prefix| {
                pts.iter().map(move |&p| {
                    let mut row = prefix.clone();
                    row.push(p);
                    row
                })
            })
            .collect();
    }
    rows
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_header(n: usize) -> String {
    let mut cols: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    cols.push("value".into());
    cols.join(",")
}

/// Rows with `None` values are written as `NA`.
pub fn write_csv(points: &[Vec<f64>], values: &[Option<f64>]) -> String {
    let n = points.first().map_or(0, Vec::len);
    let mut out = csv_header(n);
    out.push('\n');
    for (p, v) in points.iter().zip(values) {
        for c in p {
            out.push_str(&fmt_value(*c));
            out.push(',');
        }
        match v {
            Some(x) => out.push_str(&fmt_value(*x)),
            None => out.push_str("NA"),
        }
        out.push('\n');
    }
    out
}

/// Parse a CSV written by [`write_csv`].
#[cfg(test)]
pub fn read_csv(text: &str) -> Result<(Vec<Vec<f64>>, Vec<Option<f64>>), CliError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| CliError::Usage("empty CSV".into()))?;
    let n = header.split(',').count().saturating_sub(1);
    let mut points = Vec::new();
    let mut values = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n + 1 {
            return Err(CliError::Usage(format!("CSV row `{line}` has {} fields", fields.len())));
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|_| CliError::Usage(format!("bad number `{s}`")));
        points.push(fields[..n].iter().map(|s| parse(s)).collect::<Result<Vec<_>, _>>()?);
        values.push(match fields[n] {
            "NA" => None,
            s => Some(parse(s)?),
        });
    }
    Ok((points, values))
}
