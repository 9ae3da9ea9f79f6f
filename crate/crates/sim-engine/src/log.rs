//! Per-tick trajectory records and their CSV form.

use nalgebra::DVector;

/// Columnar per-tick record of one episode.
///
/// Each row is the pre-update picture of one tick: the plant state, the
/// observation drawn from it, the belief and hyperparameters the controller
/// held entering the tick, the action applied to the plant during the tick,
/// and the free energy of that configuration. Row zero therefore shows the
/// initial conditions exactly. Episodes driven by a PID baseline have no
/// belief or hyperparameters; those columns are zero and the action is the
/// PID output for the tick.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub dof: usize,
    pub dt: f64,
    pub t: Vec<f64>,
    pub q: Vec<DVector<f64>>,
    pub q_dot: Vec<DVector<f64>>,
    pub o: Vec<DVector<f64>>,
    pub o_p: Vec<DVector<f64>>,
    pub mu: Vec<DVector<f64>>,
    pub mu_p: Vec<DVector<f64>>,
    pub mu_pp: Vec<DVector<f64>>,
    pub a: Vec<DVector<f64>>,
    pub free_energy: Vec<f64>,
    pub beta_diag: Vec<DVector<f64>>,
    pub pi_o_diag: Vec<DVector<f64>>,
    pub pi_op_diag: Vec<DVector<f64>>,
    /// Target in force at each tick. Kept for metrics over scheduled
    /// episodes; not part of the CSV surface.
    pub target: Vec<DVector<f64>>,
}

impl TrajectoryLog {
    pub fn with_capacity(dof: usize, dt: f64, rows: usize) -> Self {
        TrajectoryLog {
            dof,
            dt,
            t: Vec::with_capacity(rows),
            q: Vec::with_capacity(rows),
            q_dot: Vec::with_capacity(rows),
            o: Vec::with_capacity(rows),
            o_p: Vec::with_capacity(rows),
            mu: Vec::with_capacity(rows),
            mu_p: Vec::with_capacity(rows),
            mu_pp: Vec::with_capacity(rows),
            a: Vec::with_capacity(rows),
            free_energy: Vec::with_capacity(rows),
            beta_diag: Vec::with_capacity(rows),
            pi_o_diag: Vec::with_capacity(rows),
            pi_op_diag: Vec::with_capacity(rows),
            target: Vec::with_capacity(rows),
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Episode duration implied by the log: one dt per recorded tick.
    pub fn duration(&self) -> f64 {
        self.len() as f64 * self.dt
    }

    /// CSV with one row per tick. Header names are suffixed with the joint
    /// index; floats carry 9 significant digits.
    pub fn to_csv(&self) -> String {
        let n = self.dof;
        let mut out = String::new();
        out.push('t');
        for (prefix, _) in Self::vector_columns(self) {
            for j in 0..n {
                out.push(',');
                out.push_str(prefix);
                out.push_str(&j.to_string());
            }
            if prefix == "a" {
                out.push_str(",F");
            }
        }
        out.push('\n');

        for row in 0..self.len() {
            out.push_str(&fmt(self.t[row]));
            for (prefix, col) in Self::vector_columns(self) {
                for j in 0..n {
                    out.push(',');
                    out.push_str(&fmt(col[row][j]));
                }
                if prefix == "a" {
                    out.push(',');
                    out.push_str(&fmt(self.free_energy[row]));
                }
            }
            out.push('\n');
        }
        out
    }

    fn vector_columns(&self) -> [(&'static str, &Vec<DVector<f64>>); 11] {
        [
            ("q", &self.q),
            ("qd", &self.q_dot),
            ("o", &self.o),
            ("op", &self.o_p),
            ("mu", &self.mu),
            ("mup", &self.mu_p),
            ("mupp", &self.mu_pp),
            ("a", &self.a),
            ("beta", &self.beta_diag),
            ("pio", &self.pi_o_diag),
            ("piop", &self.pi_op_diag),
        ]
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.8e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn tiny_log() -> TrajectoryLog {
        let mut log = TrajectoryLog::with_capacity(2, 0.5, 1);
        log.t.push(0.0);
        log.q.push(dvector![1.0, 2.0]);
        log.q_dot.push(dvector![3.0, 4.0]);
        log.o.push(dvector![1.0, 2.0]);
        log.o_p.push(dvector![3.0, 4.0]);
        log.mu.push(dvector![0.1, 0.2]);
        log.mu_p.push(dvector![0.0, 0.0]);
        log.mu_pp.push(dvector![0.0, 0.0]);
        log.a.push(dvector![5.0, 6.0]);
        log.free_energy.push(0.125);
        log.beta_diag.push(dvector![1.0, 1.0]);
        log.pi_o_diag.push(dvector![1.5, 1.5]);
        log.pi_op_diag.push(dvector![0.5, 0.5]);
        log.target.push(dvector![0.0, 0.0]);
        log
    }

    #[test]
    fn header_lists_every_joint_of_every_column() {
        let csv = tiny_log().to_csv();
        let header = csv.lines().next().unwrap();
        assert_eq!(
            header,
            "t,q0,q1,qd0,qd1,o0,o1,op0,op1,mu0,mu1,mup0,mup1,mupp0,mupp1,\
             a0,a1,F,beta0,beta1,pio0,pio1,piop0,piop1"
        );
    }

    #[test]
    fn values_round_trip_through_the_csv_text() {
        let csv = tiny_log().to_csv();
        let row = csv.lines().nth(1).unwrap();
        let fields: Vec<f64> = row.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(fields[0], 0.0);
        assert_eq!(fields[1], 1.0);
        assert_eq!(fields[17], 0.125);
        assert_eq!(fields.len(), 24);
    }

    #[test]
    fn floats_carry_nine_significant_digits() {
        assert_eq!(fmt(std::f64::consts::PI), "3.14159265e0");
        assert_eq!(fmt(-0.0001234567891), "-1.23456789e-4");
    }
}
