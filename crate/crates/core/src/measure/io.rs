//! CSV interchange for measurement records and probability grids.
//!
//! Both formats start with a `# key=value ...` metadata line followed by a
//! header row. Floating-point columns are written with 17 significant digits
//! so binary64 values survive the text round trip.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::measure::grid::SphereGrid;
use crate::measure::probability::ProbabilityGrid;
use crate::measure::sampling::MeasurementRecord;
use crate::sphere::SpherePoint;

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn write_metadata<W: Write>(w: &mut W, pairs: &[(&str, String)]) -> Result<()> {
    let body: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
    writeln!(w, "# {}", body.join(" "))?;
    Ok(())
}

/// Parsed CSV: leading `# k=v` metadata, header names, data rows with their
/// 1-based line numbers.
pub(crate) struct Table {
    pub metadata: BTreeMap<String, String>,
    pub header: Vec<String>,
    pub rows: Vec<(u64, Vec<String>)>,
}

pub(crate) fn read_table<R: Read>(mut reader: R) -> Result<Table> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let mut metadata = BTreeMap::new();
    for line in text.lines() {
        let Some(rest) = line.trim_start().strip_prefix('#') else { break };
        for token in rest.split_whitespace() {
            if let Some((k, v)) = token.split_once('=') {
                metadata.insert(k.to_string(), v.to_string());
            }
        }
    }
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::Parse { line, message: e.to_string() }
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != header.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", header.len(), rec.len()),
            });
        }
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(Table { metadata, header, rows })
}

pub(crate) fn parse_field<T: std::str::FromStr>(line: u64, name: &str, raw: &str) -> Result<T> {
    raw.parse::<T>().map_err(|_| Error::Parse { line, message: format!("cannot parse {name} value {raw:?}") })
}

fn column(header: &[String], name: &str) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Parse { line: 1, message: format!("missing column {name:?}") })
}

fn metadata_int(table: &Table, key: &str) -> Result<Option<i64>> {
    table
        .metadata
        .get(key)
        .map(|v| v.parse::<i64>().map_err(|_| Error::Parse { line: 1, message: format!("bad metadata {key}={v}") }))
        .transpose()
}

fn read_grid(table: &Table) -> Result<(SphereGrid, Vec<u64>)> {
    let (ct, cp, cw, cs) = (
        column(&table.header, "theta")?,
        column(&table.header, "phi")?,
        column(&table.header, "weight")?,
        column(&table.header, "shots")?,
    );
    let mut points = Vec::with_capacity(table.rows.len());
    let mut weights = Vec::with_capacity(table.rows.len());
    let mut shots = Vec::with_capacity(table.rows.len());
    for (line, row) in &table.rows {
        let theta: f64 = parse_field(*line, "theta", &row[ct])?;
        let phi: f64 = parse_field(*line, "phi", &row[cp])?;
        points.push(SpherePoint::new(theta, phi).map_err(|e| Error::Parse { line: *line, message: e.to_string() })?);
        weights.push(parse_field(*line, "weight", &row[cw])?);
        shots.push(parse_field(*line, "shots", &row[cs])?);
    }
    if points.is_empty() {
        return Err(Error::Parse { line: 2, message: "no data rows".into() });
    }
    Ok((SphereGrid::from_nodes(points, weights)?, shots))
}

fn count_label(mu: HalfInteger) -> String {
    format!("c_{}", mu.twice())
}

pub fn write_record_csv<W: Write>(rec: &MeasurementRecord, mut w: W) -> Result<()> {
    write_metadata(&mut w, &[("two_j", rec.j().twice().to_string()), ("seed", rec.seed().to_string())])?;
    let mut out = csv::Writer::from_writer(&mut w);
    let mut header = vec!["theta".to_string(), "phi".into(), "weight".into(), "shots".into()];
    header.extend(rec.j().projections().map(count_label));
    out.write_record(&header)?;
    for (i, p) in rec.grid().points().iter().enumerate() {
        let mut row = vec![fmt_f64(p.theta()), fmt_f64(p.phi()), fmt_f64(rec.grid().weights()[i]), rec.shots()[i].to_string()];
        row.extend(rec.counts()[i].iter().map(u64::to_string));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_record_csv<R: Read>(r: R) -> Result<MeasurementRecord> {
    let table = read_table(r)?;
    let labels: Vec<i32> = table
        .header
        .iter()
        .filter_map(|h| h.strip_prefix("c_"))
        .map(|t| t.parse::<i32>().map_err(|_| Error::Parse { line: 1, message: format!("bad count column c_{t}") }))
        .collect::<Result<_>>()?;
    let two_j = match metadata_int(&table, "two_j")? {
        Some(v) => v as i32,
        None => *labels.first().ok_or_else(|| Error::Parse { line: 1, message: "no count columns".into() })?,
    };
    let j = HalfInteger::from_twice(two_j).check_label()?;
    let expected: Vec<i32> = j.projections().map(|m| m.twice()).collect();
    if labels != expected {
        return Err(Error::Parse { line: 1, message: format!("count columns {labels:?} do not match two_j = {two_j}") });
    }
    let (grid, shots) = read_grid(&table)?;
    let cols: Vec<usize> = j.projections().map(|m| column(&table.header, &count_label(m))).collect::<Result<_>>()?;
    let mut counts = Vec::with_capacity(table.rows.len());
    for ((line, row), s) in table.rows.iter().zip(&shots) {
        let c: Vec<u64> = cols.iter().map(|&k| parse_field(*line, &table.header[k], &row[k])).collect::<Result<_>>()?;
        if c.iter().sum::<u64>() != *s {
            return Err(Error::Parse { line: *line, message: format!("counts do not sum to shots = {s}") });
        }
        counts.push(c);
    }
    let seed = metadata_int(&table, "seed")?.unwrap_or(0) as u64;
    MeasurementRecord::new(grid, j, counts, seed)
}

pub fn write_probability_csv<W: Write>(pg: &ProbabilityGrid, mut w: W) -> Result<()> {
    write_metadata(&mut w, &[("two_j", pg.j().twice().to_string()), ("two_mu", pg.mu().twice().to_string())])?;
    let mut out = csv::Writer::from_writer(&mut w);
    out.write_record(["theta", "phi", "weight", "shots", "p"])?;
    for (i, p) in pg.grid().points().iter().enumerate() {
        out.write_record([
            fmt_f64(p.theta()),
            fmt_f64(p.phi()),
            fmt_f64(pg.grid().weights()[i]),
            pg.shots()[i].to_string(),
            fmt_f64(pg.values()[i]),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a probability CSV. `two_j`/`two_mu` come from the metadata line or,
/// failing that, from `fallback`.
pub fn read_probability_csv<R: Read>(r: R, fallback: Option<(HalfInteger, HalfInteger)>) -> Result<ProbabilityGrid> {
    let table = read_table(r)?;
    let (j, mu) = match (metadata_int(&table, "two_j")?, metadata_int(&table, "two_mu")?, fallback) {
        (Some(tj), Some(tm), _) => (HalfInteger::from_twice(tj as i32), HalfInteger::from_twice(tm as i32)),
        (Some(tj), None, _) => (HalfInteger::from_twice(tj as i32), HalfInteger::from_twice(tj as i32)),
        (None, _, Some(f)) => f,
        (None, _, None) => {
            return Err(Error::Parse { line: 1, message: "missing two_j metadata and no fallback given".into() })
        }
    };
    let (grid, shots) = read_grid(&table)?;
    let cp = column(&table.header, "p")?;
    let values = table.rows.iter().map(|(line, row)| parse_field(*line, "p", &row[cp])).collect::<Result<Vec<f64>>>()?;
    ProbabilityGrid::new(grid, j, mu, values, shots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{build_grid, exact_probability_grid, sample_measurements};
    use crate::states::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn record_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let j = HalfInteger::from_twice(3);
        let rho = random::mixed(j, 2, &mut rng);
        let rec = sample_measurements(&rho, &build_grid(j, 1.0).unwrap(), 100, 5).unwrap();
        let mut buf = Vec::new();
        write_record_csv(&rec, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.lines().nth(1).unwrap() == "theta,phi,weight,shots,c_3,c_1,c_-1,c_-3");
        let back = read_record_csv(buf.as_slice()).unwrap();
        assert_eq!(back, rec);
        assert!(back.grid().exactness_degree().is_some());
    }

    #[test]
    fn probability_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let j = HalfInteger::from_twice(4);
        let rho = random::mixed(j, 2, &mut rng);
        let pg = exact_probability_grid(&rho, &build_grid(j, 1.0).unwrap(), j).unwrap();
        let mut buf = Vec::new();
        write_probability_csv(&pg, &mut buf).unwrap();
        let back = read_probability_csv(buf.as_slice(), None).unwrap();
        assert_eq!(back, pg);
    }

    #[test]
    fn malformed_rows_report_line_numbers() {
        let text = "# two_j=1 two_mu=1\ntheta,phi,weight,shots,p\n0.5,0.0,12.566370614359172,0,0.3\n0.5,abc,1.0,0,0.3\n";
        match read_probability_csv(text.as_bytes(), None) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 4, "{message}");
                assert!(message.contains("phi"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let short = "# two_j=1\ntheta,phi,weight,shots,p\n0.5,0.0\n";
        assert!(matches!(read_probability_csv(short.as_bytes(), None), Err(Error::Parse { line: 3, .. })));
    }
}
