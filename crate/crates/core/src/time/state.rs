/// Nodal values of the four PML fields at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u: Vec<f64>,
    pub px: Vec<f64>,
    pub py: Vec<f64>,
    pub u_star: Vec<f64>,
    pub p_star_x: Vec<f64>,
    pub p_star_y: Vec<f64>,
    pub t: f64,
}

impl State {
    pub fn zeros(n: usize) -> Self {
        State {
            u: vec![0.0; n],
            px: vec![0.0; n],
            py: vec![0.0; n],
            u_star: vec![0.0; n],
            p_star_x: vec![0.0; n],
            p_star_y: vec![0.0; n],
            t: 0.0,
        }
    }

    pub fn fields(&self) -> [&[f64]; 6] {
        [&self.u, &self.px, &self.py, &self.u_star, &self.p_star_x, &self.p_star_y]
    }

    pub fn is_finite(&self) -> bool {
        self.fields().iter().all(|f| f.iter().all(|v| v.is_finite()))
    }

    pub fn max_abs(&self) -> f64 {
        self.fields()
            .iter()
            .flat_map(|f| f.iter())
            .fold(0.0, |m: f64, v| m.max(v.abs()))
    }
}
