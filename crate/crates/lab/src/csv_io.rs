//! Trace CSV: `t, tau_re, tau_im, L[p/q]..., N[p/q]..., residual`.

use std::io::{Read, Write};

use teichflow::FlowTrace;

use crate::error::{LabError, LabResult};
use crate::numfmt::fmt12;

pub fn header(trace: &FlowTrace) -> Vec<String> {
    let mut h = vec!["t".to_string(), "tau_re".into(), "tau_im".into()];
    h.extend(trace.family().iter().map(|s| format!("L[{s}]")));
    h.extend(trace.family().iter().map(|s| format!("N[{s}]")));
    h.push("residual".into());
    h
}

pub fn write_trace<W: Write>(trace: &FlowTrace, out: W) -> LabResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(trace))?;
    for s in trace.samples() {
        let (re, im) = s.tau_or_nan();
        let mut row = vec![fmt12(s.t), fmt12(re), fmt12(im)];
        row.extend(s.raw.iter().map(|v| fmt12(*v)));
        row.extend(s.normalized.values().iter().map(|v| fmt12(*v)));
        row.push(fmt12(s.residual));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| LabError::io("<csv>", e))?;
    Ok(())
}

pub fn trace_to_string(trace: &FlowTrace) -> LabResult<String> {
    let mut buf = Vec::new();
    write_trace(trace, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Per-slope columns read back from a trace CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceTable {
    pub slopes: Vec<String>,
    pub t: Vec<f64>,
    /// `raw[k][j]`: `L` of slope `j` at sample `k`.
    pub raw: Vec<Vec<f64>>,
    /// `normalized[k][j]`: `N` of slope `j` at sample `k`.
    pub normalized: Vec<Vec<f64>>,
}

pub fn read_trace<R: Read>(input: R) -> LabResult<TraceTable> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.get(0) != Some("t") {
        return Err(LabError::MalformedTrace("first column must be t".into()));
    }
    let cols = |prefix: &str| -> Vec<(usize, String)> {
        headers
            .iter()
            .enumerate()
            .filter_map(|(i, h)| {
                h.strip_prefix(prefix).and_then(|rest| rest.strip_suffix(']')).map(|s| (i, s.to_string()))
            })
            .collect()
    };
    let (lcols, ncols) = (cols("L["), cols("N["));
    if ncols.is_empty() || lcols.len() != ncols.len() {
        return Err(LabError::MalformedTrace("missing or mismatched L[..]/N[..] columns".into()));
    }
    let mut table = TraceTable {
        slopes: ncols.iter().map(|c| c.1.clone()).collect(),
        t: Vec::new(),
        raw: Vec::new(),
        normalized: Vec::new(),
    };
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize| -> LabResult<f64> {
            rec.get(i)
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| LabError::MalformedTrace(format!("bad number in column {i}")))
        };
        table.t.push(num(0)?);
        table.raw.push(lcols.iter().map(|c| num(c.0)).collect::<LabResult<_>>()?);
        table.normalized.push(ncols.iter().map(|c| num(c.0)).collect::<LabResult<_>>()?);
    }
    if table.t.is_empty() {
        return Err(LabError::MalformedTrace("no samples".into()));
    }
    if table.t.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
        return Err(LabError::MalformedTrace("t must be strictly increasing".into()));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::default_earthquake;
    use teichflow::flow::run_flow;

    #[test]
    fn round_trip() {
        let mut cfg = default_earthquake();
        cfg.depth = 1;
        cfg.schedule.count = 4;
        let tr = run_flow(&cfg).unwrap();
        let text = trace_to_string(&tr).unwrap();
        assert!(text.starts_with("t,tau_re,tau_im,L[1/0],L[0/1]"));
        let table = read_trace(text.as_bytes()).unwrap();
        assert_eq!(table.t, vec![1.0, 2.0, 4.0, 8.0]);
        assert_eq!(table.slopes.len(), tr.family().len());
        assert!((table.normalized[3][1] - tr.samples()[3].normalized.values()[1]).abs() < 1e-11);
    }

    #[test]
    fn rejects_empty_and_garbage() {
        assert!(read_trace("".as_bytes()).is_err());
        assert!(read_trace("t,tau_re,tau_im,L[1/0],N[1/0],residual\n".as_bytes()).is_err());
        assert!(read_trace("t,x\n1,2\n".as_bytes()).is_err());
        assert!(read_trace("t,tau_re,tau_im,L[1/0],N[1/0],residual\n1,0,1,zz,1,0\n".as_bytes()).is_err());
    }
}
