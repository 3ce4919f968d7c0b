//! Parameter grids given on the command line: `a,b,c` lists or
//! `start:step:end` inclusive ranges.

/// Parses a list or range of numbers.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err("empty grid".into());
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, step, end] = parts[..] else {
            return Err(format!("range `{spec}` must be start:step:end"));
        };
        let (start, step, end) = (number(start)?, number(step)?, number(end)?);
        if step.is_nan() || step <= 0.0 {
            return Err(format!("range step must be > 0, got {step}"));
        }
        if end < start {
            return Err(format!("range end {end} is below start {start}"));
        }
        let count = ((end - start) / step + 1e-9).floor() as usize + 1;
        // round away the drift of repeated float steps, e.g. 0.1 * 3
        Ok((0..count)
            .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
            .collect())
    } else {
        spec.split(',').map(number).collect()
    }
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{}` is not a number", s.trim()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{}` is not finite", s.trim()))
    }
}
