//! Union-find and Laplacian views of the same plans.

use backhaul::connectivity::LaplacianView;
use backhaul::{fiedler_value, is_connected, DisjointSet, LinkKind, Plan};

fn ring(m: usize, skip: Option<usize>) -> Plan {
    let mut p = Plan::empty(m);
    for i in 0..m {
        if Some(i) != skip {
            p.set(i, (i + 1) % m, LinkKind::Of);
        }
    }
    p
}

fn main() -> backhaul::Result<()> {
    for (name, p) in [
        ("ring", ring(6, None)),
        ("path", ring(6, Some(5))),
        ("split", {
            let mut p = ring(6, Some(5));
            p.set(2, 3, LinkKind::None);
            p
        }),
    ] {
        let spectrum = LaplacianView::new(&p).spectrum();
        println!(
            "{name:>5}: connected={} lambda2={:.4} spectrum={:.3?}",
            is_connected(&p),
            fiedler_value(&p)?,
            spectrum
        );
    }

    let mut dsu = DisjointSet::new(4);
    dsu.union(0, 1);
    let cp = dsu.checkpoint();
    dsu.union(2, 3);
    dsu.union(1, 2);
    println!("components after unions: {}", dsu.components());
    dsu.rollback(cp);
    println!("components after rollback: {}", dsu.components());
    Ok(())
}
