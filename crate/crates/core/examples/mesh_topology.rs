//! The space-time mesh: tetrahedra per slab, faces by kind, and the faces
//! around one vertex.
//!
//! cargo run --release --example mesh_topology

use vfcp::field::Dims;
use vfcp::mesh::{for_each_face, incident_faces, tet_count};

fn main() -> vfcp::Result<()> {
    let dims = Dims::new(5, 6, 3)?;
    let (mut slice, mut slab) = (0, 0);
    for_each_face(&dims, |f| {
        if f.is_slice(&dims) {
            slice += 1
        } else {
            slab += 1
        }
    });
    println!(
        "{}x{}x{} grid: {} tetrahedra, {slice} slice faces, {slab} slab faces",
        dims.h,
        dims.w,
        dims.t,
        tet_count(&dims)
    );
    let v = dims.vid(1, 2, 3);
    let faces = incident_faces(&dims, v);
    println!(
        "interior vertex {v} (t=1, i=2, j=3) lies on {} faces:",
        faces.len()
    );
    for f in faces.iter().take(6) {
        let kind = if f.is_slice(&dims) { "slice" } else { "slab" };
        println!("  {:?} {kind}", f.vertices().map(|id| dims.coords(id)));
    }
    Ok(())
}
