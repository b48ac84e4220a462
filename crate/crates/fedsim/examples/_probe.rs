use fedsim::data::synth_evcs_dataset;

fn main() {
    for seed in [1u64, 7, 42] {
        let ds = synth_evcs_dataset(4000, 20, seed).unwrap();
        let d = ds.n_features();
        let n = ds.n_rows();
        let mut w = vec![0.0; d];
        let mut b = 0.0;
        for _ in 0..300 {
            let mut gw = vec![0.0; d];
            let mut gb = 0.0;
            for i in 0..n {
                let row = ds.features.row(i);
                let z: f64 = b + row.iter().zip(&w).map(|(&x, &wj)| x * wj).sum::<f64>();
                let p = 1.0 / (1.0 + (-z).exp());
                let err = p - f64::from(ds.labels[i]);
                for (g, &x) in gw.iter_mut().zip(row) { *g += err * x; }
                gb += err;
            }
            for (wj, g) in w.iter_mut().zip(&gw) { *wj -= 0.5 * g / n as f64; }
            b -= 0.5 * gb / n as f64;
        }
        let correct: usize = (0..n).filter(|&i| {
            let row = ds.features.row(i);
            let z: f64 = b + row.iter().zip(&w).map(|(&x, &wj)| x * wj).sum::<f64>();
            u8::from(z >= 0.0) == ds.labels[i]
        }).count();
        println!("seed {seed}: logistic train acc = {:.4}", correct as f64 / n as f64);
    }
}
