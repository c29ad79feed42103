use oscsync::*;

fn main() {
    let g = DirectedGraph::standin10();
    let l = g.laplacian();
    let spectrum = spectral_decomposition(&l).unwrap();
    let w = omega_reference();
    let sys = SystemMatrices::new(w, 0.1, l).unwrap();
    let frame = EpsNormFrame::build(&sys, &spectrum, None).unwrap();
    let cert = certificate(&sys, &frame, &spectrum, 0.5, 10.0, 0.01).unwrap();
    println!("rho        = {:.17e}", cert.rho);
    println!("norm_eps   = {:.17e}", cert.norm_eps);
    println!("c_out      = {:.17e}", cert.c_out);
    println!("c_in       = {:.17e}", cert.c_in);
    println!("m_thr      = {:.17e}", cert.m_threshold);
    println!("theta      = {:.17e}", cert.theta);
    println!("dwell      = {}", cert.dwell_samples);
    println!("s1         = {:.17e}", cert.s1_radius);
    println!("s2         = {:.17e}", cert.s2_radius);
    println!("xi_bar     = {:.17e}", cert.xi_bar);
}
