//! Column layout of the transformation model.

use serde::{Deserialize, Serialize};

/// Dense index maps from model indices to column numbers.
///
/// Periods are 1-based (`t = 1..=periods`); trip positions start at 0, and
/// position `trips` of a sequence denotes the return to the depot (state of
/// charge only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableCatalog {
    pub periods: u32,
    pub types: usize,
    pub sequences: usize,
    pub stations: usize,
    pub trips_per_sequence: Vec<usize>,
    stock_base: usize,
    purchase_base: usize,
    depot_base: usize,
    station_base: usize,
    assign_base: usize,
    theta_base: usize,
    soc_base: Vec<usize>,
    recharge_base: Vec<usize>,
    total: usize,
}

impl VariableCatalog {
    pub fn new(periods: u32, types: usize, stations: usize, trips_per_sequence: Vec<usize>) -> Self {
        let n = periods as usize;
        let sequences = trips_per_sequence.len();
        let stock_base = 0;
        let purchase_base = stock_base + types * n;
        let depot_base = purchase_base + types * n;
        let station_base = depot_base + n;
        let assign_base = station_base + stations * n;
        let theta_base = assign_base + sequences * types * n;
        let mut next = theta_base + sequences * n;
        let mut soc_base = Vec::with_capacity(sequences);
        let mut recharge_base = Vec::with_capacity(sequences);
        for &m in &trips_per_sequence {
            soc_base.push(next);
            next += (m + 1) * n;
            recharge_base.push(next);
            next += m * n;
        }
        Self {
            periods,
            types,
            sequences,
            stations,
            trips_per_sequence,
            stock_base,
            purchase_base,
            depot_base,
            station_base,
            assign_base,
            theta_base,
            soc_base,
            recharge_base,
            total: next,
        }
    }

    fn slot(&self, t: u32) -> usize {
        debug_assert!(t >= 1 && t <= self.periods, "period {t} out of range");
        (t - 1) as usize
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn periods(&self) -> impl Iterator<Item = u32> {
        1..=self.periods
    }

    /// Buses of type `k` held in period `t`.
    pub fn stock(&self, k: usize, t: u32) -> usize {
        self.stock_base + k * self.periods as usize + self.slot(t)
    }

    pub fn purchase(&self, k: usize, t: u32) -> usize {
        self.purchase_base + k * self.periods as usize + self.slot(t)
    }

    /// Night charging facilities at the depot.
    pub fn depot_chargers(&self, t: u32) -> usize {
        self.depot_base + self.slot(t)
    }

    /// Opportunity charging facility at candidate station `i`.
    pub fn station_charger(&self, i: usize, t: u32) -> usize {
        self.station_base + i * self.periods as usize + self.slot(t)
    }

    pub fn assign(&self, s: usize, k: usize, t: u32) -> usize {
        self.assign_base + (s * self.types + k) * self.periods as usize + self.slot(t)
    }

    /// Usable capacity delimiter of sequence `s`.
    pub fn capacity(&self, s: usize, t: u32) -> usize {
        self.theta_base + s * self.periods as usize + self.slot(t)
    }

    /// State of charge before trip position `p`, or at the depot if `p` equals
    /// the trip count.
    pub fn soc(&self, s: usize, p: usize, t: u32) -> usize {
        debug_assert!(p <= self.trips_per_sequence[s]);
        self.soc_base[s] + p * self.periods as usize + self.slot(t)
    }

    /// Energy recharged before trip position `p`.
    pub fn recharge(&self, s: usize, p: usize, t: u32) -> usize {
        debug_assert!(p < self.trips_per_sequence[s]);
        self.recharge_base[s] + p * self.periods as usize + self.slot(t)
    }

    /// Column name encoding variable, indices and period.
    pub fn name(&self, col: usize) -> String {
        let n = self.periods as usize;
        let split = |offset: usize| (offset / n, offset % n + 1);
        if col < self.purchase_base {
            let (k, t) = split(col - self.stock_base);
            format!("n_k{k}_t{t}")
        } else if col < self.depot_base {
            let (k, t) = split(col - self.purchase_base);
            format!("p_k{k}_t{t}")
        } else if col < self.station_base {
            format!("a_t{}", col - self.depot_base + 1)
        } else if col < self.assign_base {
            let (i, t) = split(col - self.station_base);
            format!("y_i{i}_t{t}")
        } else if col < self.theta_base {
            let (sk, t) = split(col - self.assign_base);
            format!("x_s{}_k{}_t{t}", sk / self.types, sk % self.types)
        } else if col < self.soc_base.first().copied().unwrap_or(self.total) {
            let (s, t) = split(col - self.theta_base);
            format!("theta_s{s}_t{t}")
        } else {
            let s = self.soc_base.partition_point(|&b| b <= col) - 1;
            if col < self.recharge_base[s] {
                let (p, t) = split(col - self.soc_base[s]);
                format!("q_s{s}_p{p}_t{t}")
            } else {
                let (p, t) = split(col - self.recharge_base[s]);
                format!("w_s{s}_p{p}_t{t}")
            }
        }
    }

    /// Whether column `col` is an integer or binary decision.
    pub fn is_integer(&self, col: usize) -> bool {
        col < self.theta_base
    }
}
