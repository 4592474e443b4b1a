use quadbound::hull::*;
use quadbound::tessellation::{Arc, TessellationT5};
fn main() {
    let fam = IntervalFamily::new(vec![Arc::new(-0.025, 0.05)], 16.0).unwrap();
    let mut t = TessellationT5::new();
    match assemble(&fam, &mut t) {
        Ok(d) => println!("assemble ok: {} pent {} quad {} tri", d.pentagons.len(), d.quads.len(), d.triangles.len()),
        Err(e) => println!("assemble error: {e}"),
    }
}
