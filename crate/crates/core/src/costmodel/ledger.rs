/// Service and adjustment charge of one request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Charge {
    pub service: u64,
    pub adjust: u64,
}

/// Per-request charges of one run. Totals are exact; the averaged view
/// divides by the number of requests.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CostLedger {
    charges: Vec<Charge>,
}

impl CostLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(m: usize) -> Self {
        CostLedger {
            charges: Vec::with_capacity(m),
        }
    }

    pub fn push(&mut self, service: u64, adjust: u64) {
        self.charges.push(Charge { service, adjust });
    }

    pub fn charges(&self) -> &[Charge] {
        &self.charges
    }

    pub fn len(&self) -> usize {
        self.charges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.charges.is_empty()
    }

    pub fn service_total(&self) -> u64 {
        self.charges.iter().map(|c| c.service).sum()
    }

    pub fn adjust_total(&self) -> u64 {
        self.charges.iter().map(|c| c.adjust).sum()
    }

    pub fn total(&self) -> u64 {
        self.service_total() + self.adjust_total()
    }

    /// Total charge of the first `m` requests.
    pub fn prefix_total(&self, m: usize) -> u64 {
        self.charges[..m.min(self.len())]
            .iter()
            .map(|c| c.service + c.adjust)
            .sum()
    }

    /// Average cost per request (`total / m`); zero for an empty ledger.
    pub fn average(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.total() as f64 / self.len() as f64
        }
    }

    pub fn extend(&mut self, other: &CostLedger) {
        self.charges.extend_from_slice(&other.charges);
    }

    pub fn concat(&self, other: &CostLedger) -> CostLedger {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    pub const CSV_HEADER: &'static str = "request_index,service,adjust,cumulative";

    /// CSV body (header included) without metadata lines.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(16 * self.len() + 40);
        s.push_str(Self::CSV_HEADER);
        s.push('\n');
        let mut cum = 0u64;
        for (i, c) in self.charges.iter().enumerate() {
            cum += c.service + c.adjust;
            s.push_str(&format!("{},{},{},{}\n", i, c.service, c.adjust, cum));
        }
        s
    }
}
