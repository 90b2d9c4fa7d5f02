use dcrel::preset;
use dcrel::budget::Budget;
use std::time::{Duration, Instant};
fn main() {
    let d = preset::build("preord2", 2, Budget::default()).unwrap();
    let _ = d.check_discrete().unwrap();
    let (mut t_maps, mut t_comp, mut t_cells, mut t_med) =
        (Duration::ZERO, Duration::ZERO, Duration::ZERO, Duration::ZERO);
    let (mut n_maps, mut n_comp, mut n_cells) = (0u64, 0u64, 0u64);
    let map_homs = |z, a| -> Vec<dcrel::reldbl::MRelation> {
        d.hom_rel(z, a).unwrap().into_iter().filter(|r| {
            d.cat.is_mono(r.left).unwrap() && d.classify_vertical(r.left).unwrap().cover
        }).collect()
    };
    for &a in &d.carriers {
        for &b in &d.carriers {
            for r in d.hom_rel(a, b).unwrap() {
                let l_comp = d.companion(r.left).unwrap();
                let r_comp = d.companion(r.right).unwrap();
                for &z in &d.carriers {
                    let t = Instant::now();
                    let p1s = map_homs(z, a);
                    let p2s = map_homs(z, b);
                    let u_cands = map_homs(z, r.apex);
                    t_maps += t.elapsed(); n_maps += 3;
                    for p1 in &p1s {
                        for p2 in &p2s {
                            let t = Instant::now();
                            let bottom = d.compose_h(p1, &r).unwrap();
                            t_comp += t.elapsed(); n_comp += 1;
                            let t = Instant::now();
                            let id_z = d.cat.identity(z);
                            let id_b = d.cat.identity(b);
                            let _has = !d.enumerate_cells(p2, &bottom, id_z, id_b).unwrap().is_empty();
                            t_cells += t.elapsed(); n_cells += 1;
                            let t = Instant::now();
                            let mut _m = 0;
                            for u in &u_cands {
                                if d.compose_h(u, &l_comp).unwrap() == *p1
                                    && d.compose_h(u, &r_comp).unwrap() == *p2 { _m += 1; }
                            }
                            t_med += t.elapsed();
                        }
                    }
                }
            }
        }
    }
    println!("maps: {t_maps:?} ({n_maps}), compose: {t_comp:?} ({n_comp}), cells: {t_cells:?} ({n_cells}), mediate: {t_med:?}");
}
