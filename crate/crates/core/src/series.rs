//! Curve containers shared by the exact, asymptotic, simulated, and
//! corpus paths.

/// What a series of (n, value) points measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    /// Expected error on the next sample after n samples.
    InstMean,
    /// Variance of that indicator, `mu_n (1 - mu_n)`.
    InstVar,
    /// Expected error averaged over the first N samples.
    TimeAvgMean,
    /// Variance of the time-averaged error.
    TimeAvgVar,
    /// Expected total number of errors in the first N samples.
    CumulativeMean,
    /// Monte-Carlo estimate of `InstMean`.
    McInstMean,
    /// Monte-Carlo estimate of `TimeAvgMean`.
    McTimeAvgMean,
    /// Monte-Carlo estimate of `CumulativeMean`.
    McCumulativeMean,
}

impl CurveKind {
    /// CSV column name carrying this kind's values.
    pub fn column_name(self) -> &'static str {
        match self {
            CurveKind::InstMean => "inst_mean",
            CurveKind::InstVar => "inst_var",
            CurveKind::TimeAvgMean => "timeavg_mean",
            CurveKind::TimeAvgVar => "timeavg_var",
            CurveKind::CumulativeMean => "cum_mean",
            CurveKind::McInstMean => "mc_inst_mean",
            CurveKind::McTimeAvgMean => "mc_timeavg_mean",
            CurveKind::McCumulativeMean => "mc_cum_mean",
        }
    }

    /// CSV column name for the standard-error band, where one exists.
    pub fn se_column_name(self) -> Option<&'static str> {
        match self {
            CurveKind::McInstMean => Some("mc_inst_se"),
            CurveKind::McTimeAvgMean => Some("mc_timeavg_se"),
            CurveKind::McCumulativeMean => Some("mc_cum_se"),
            _ => None,
        }
    }

    /// Inverse of [`CurveKind::column_name`].
    pub fn from_column_name(name: &str) -> Option<Self> {
        const ALL: [CurveKind; 8] = [
            CurveKind::InstMean,
            CurveKind::InstVar,
            CurveKind::TimeAvgMean,
            CurveKind::TimeAvgVar,
            CurveKind::CumulativeMean,
            CurveKind::McInstMean,
            CurveKind::McTimeAvgMean,
            CurveKind::McCumulativeMean,
        ];
        ALL.into_iter().find(|k| k.column_name() == name)
    }
}

/// Provenance carried alongside every series.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SeriesMeta {
    /// Spec string of the distribution the series came from.
    pub dist_spec: String,
    /// Number of Monte-Carlo runs averaged, if any.
    pub runs_k: Option<u64>,
    /// RNG seed, if any randomness was involved.
    pub seed: Option<u64>,
    /// Analytic bound on the truncated-away mass.
    pub tail_mass_bound: f64,
}

/// One point of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    /// Sample index (n for instantaneous kinds, N for averaged kinds).
    pub n: u64,
    pub value: f64,
    /// Standard error of `value`, for Monte-Carlo kinds.
    pub se: Option<f64>,
}

/// A curve: points strictly increasing in n, plus provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSeries {
    pub kind: CurveKind,
    pub points: Vec<CurvePoint>,
    pub meta: SeriesMeta,
}

impl CurveSeries {
    /// Series from bare (n, value) pairs.
    pub fn from_values(
        kind: CurveKind,
        meta: SeriesMeta,
        values: impl IntoIterator<Item = (u64, f64)>,
    ) -> Self {
        let points = values
            .into_iter()
            .map(|(n, value)| CurvePoint { n, value, se: None })
            .collect();
        let s = Self { kind, points, meta };
        debug_assert!(s.is_strictly_increasing());
        s
    }

    /// Whether point indices strictly increase (the core invariant).
    pub fn is_strictly_increasing(&self) -> bool {
        self.points.windows(2).all(|w| w[0].n < w[1].n)
    }

    /// Value at exactly n, if present.
    pub fn value_at(&self, n: u64) -> Option<f64> {
        self.points
            .binary_search_by_key(&n, |p| p.n)
            .ok()
            .map(|i| self.points[i].value)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// (n, value) view, handy for fitting.
    pub fn values(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.points.iter().map(|p| (p.n, p.value))
    }
}

/// Several series over a shared n axis, as written to one CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub meta: SeriesMeta,
    pub columns: Vec<CurveSeries>,
}

impl CurveTable {
    pub fn new(meta: SeriesMeta, columns: Vec<CurveSeries>) -> Self {
        Self { meta, columns }
    }

    /// Column of the given kind, if present.
    pub fn column(&self, kind: CurveKind) -> Option<&CurveSeries> {
        self.columns.iter().find(|c| c.kind == kind)
    }

    /// Column by CSV name, e.g. "inst_mean".
    pub fn column_by_name(&self, name: &str) -> Option<&CurveSeries> {
        CurveKind::from_column_name(name).and_then(|k| self.column(k))
    }

    /// Sorted union of all n values across columns.
    pub fn n_axis(&self) -> Vec<u64> {
        let mut ns: Vec<u64> = self
            .columns
            .iter()
            .flat_map(|c| c.points.iter().map(|p| p.n))
            .collect();
        ns.sort_unstable();
        ns.dedup();
        ns
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_names_round_trip() {
        for kind in [
            CurveKind::InstMean,
            CurveKind::InstVar,
            CurveKind::TimeAvgMean,
            CurveKind::TimeAvgVar,
            CurveKind::CumulativeMean,
            CurveKind::McInstMean,
            CurveKind::McTimeAvgMean,
            CurveKind::McCumulativeMean,
        ] {
            assert_eq!(CurveKind::from_column_name(kind.column_name()), Some(kind));
        }
        assert_eq!(CurveKind::from_column_name("nope"), None);
    }

    #[test]
    fn value_lookup_uses_binary_search() {
        let s = CurveSeries::from_values(
            CurveKind::InstMean,
            SeriesMeta::default(),
            (0..100).map(|n| (n * 3, n as f64)),
        );
        assert!(s.is_strictly_increasing());
        assert_eq!(s.value_at(9), Some(3.0));
        assert_eq!(s.value_at(10), None);
    }

    #[test]
    fn table_axis_is_union() {
        let a = CurveSeries::from_values(
            CurveKind::InstMean,
            SeriesMeta::default(),
            [(0, 1.0), (2, 0.5)],
        );
        let b = CurveSeries::from_values(
            CurveKind::TimeAvgMean,
            SeriesMeta::default(),
            [(1, 1.0), (2, 0.75)],
        );
        let t = CurveTable::new(SeriesMeta::default(), vec![a, b]);
        assert_eq!(t.n_axis(), vec![0, 1, 2]);
        assert!(t.column(CurveKind::InstMean).is_some());
        assert!(t.column_by_name("timeavg_mean").is_some());
        assert!(t.column(CurveKind::InstVar).is_none());
    }
}
