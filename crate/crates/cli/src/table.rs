//! CSV output: fixed column order, fixed formatting, byte-stable for
//! identical requests.

/// Column layout: `model,command,method,t,u,x,q,value,stderr,flags`.
pub const HEADER: &str = "model,command,method,t,u,x,q,value,stderr,flags";

/// Known flag names, joined with `;` in the flags column.
#[derive(Debug, Default, Clone, Copy)]
pub struct Flags {
    pub asymptotic: bool,
    pub clamped: bool,
    pub approximate_stationarity: bool,
    pub fallback_inversion: bool,
}

impl Flags {
    fn render(&self) -> String {
        let mut out: Vec<&str> = Vec::new();
        if self.asymptotic {
            out.push("asymptotic");
        }
        if self.clamped {
            out.push("clamped");
        }
        if self.approximate_stationarity {
            out.push("approximate-stationarity");
        }
        if self.fallback_inversion {
            out.push("fallback-inversion");
        }
        out.join(";")
    }
}

#[derive(Debug, Clone)]
pub struct Row {
    pub model: String,
    pub command: &'static str,
    pub method: String,
    pub t: Option<f64>,
    pub u: Option<f64>,
    pub x: Option<f64>,
    pub q: Option<f64>,
    pub value: f64,
    /// Probabilities print with 9 significant digits, decay rates with 12.
    pub wide_value: bool,
    pub stderr: Option<f64>,
    pub flags: Flags,
}

fn grid_cell(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl Row {
    pub fn render(&self) -> String {
        let value = if self.wide_value {
            format!("{:.11e}", self.value)
        } else {
            format!("{:.8e}", self.value)
        };
        let stderr = self.stderr.map(|s| format!("{s:.8e}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.model,
            self.command,
            self.method,
            grid_cell(self.t),
            grid_cell(self.u),
            grid_cell(self.x),
            grid_cell(self.q),
            value,
            stderr,
            self.flags.render()
        )
    }
}

/// Assemble the full artifact.
pub fn render_csv(rows: &[Row]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.render());
        out.push('\n');
    }
    out
}
