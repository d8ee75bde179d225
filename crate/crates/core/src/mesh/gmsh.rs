//! ASCII MSH 2.2 reader and writer.
//!
//! Only line (type 1) and triangle (type 2) elements are accepted. Line
//! elements carry boundary tags through their physical group, which is mapped
//! to a [`BoundaryTag`] by name. Boundary edges without a line element are
//! tagged as walls.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use super::{BoundaryTag, Mesh, Point};
use crate::{Error, Result};

/// Physical-group name to boundary tag lookup.
pub type TagTable = HashMap<String, BoundaryTag>;

/// `wall`, `interface`, `inflow`, `outflow` mapped to the matching tags.
pub fn default_tag_table() -> TagTable {
    BoundaryTag::ALL.into_iter().map(|t| (t.name().to_string(), t)).collect()
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-blank line with its 1-based number.
    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            self.last = i + 1;
            let l = l.trim();
            if !l.is_empty() {
                return Some((i + 1, l));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next_line().ok_or_else(|| Error::Parse {
            line: self.last + 1,
            message: format!("unexpected end of file, expected {what}"),
        })
    }

    fn expect_end(&mut self, section: &str) -> Result<()> {
        let (line, l) = self.expect(&format!("$End{section}"))?;
        if l != format!("$End{section}") {
            return Err(Error::Parse {
                line,
                message: format!("expected $End{section}, found '{l}'"),
            });
        }
        Ok(())
    }
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.and_then(|t| t.parse().ok()).ok_or_else(|| Error::Parse {
        line,
        message: format!("malformed {what}"),
    })
}

fn parse_count(lines: &mut Lines<'_>, section: &str) -> Result<usize> {
    let (line, l) = lines.expect(&format!("{section} count"))?;
    parse_num(Some(l), line, &format!("{section} count"))
}

/// Parses ASCII MSH 2.2 content into a [`Mesh`].
pub fn import_gmsh(text: &str, table: &TagTable) -> Result<Mesh> {
    let mut lines = Lines::new(text);
    let mut names: HashMap<i64, String> = HashMap::new();
    let mut nodes: Vec<(usize, Point)> = Vec::new();
    let mut node_index: HashMap<usize, usize> = HashMap::new();
    let mut lines_tagged: Vec<(usize, [usize; 2], i64)> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let mut saw_format = false;

    while let Some((line, header)) = lines.next_line() {
        match header {
            "$MeshFormat" => {
                let (fl, l) = lines.expect("format line")?;
                let mut it = l.split_whitespace();
                let version: String = parse_num(it.next(), fl, "format version")?;
                let file_type: u32 = parse_num(it.next(), fl, "file type")?;
                if !version.starts_with("2.") {
                    return Err(Error::Parse {
                        line: fl,
                        message: format!("unsupported MSH version {version}, expected 2.2"),
                    });
                }
                if file_type != 0 {
                    return Err(Error::Parse {
                        line: fl,
                        message: "binary MSH files are not supported".into(),
                    });
                }
                lines.expect_end("MeshFormat")?;
                saw_format = true;
            }
            "$PhysicalNames" => {
                let n = parse_count(&mut lines, "physical name")?;
                for _ in 0..n {
                    let (pl, l) = lines.expect("physical name")?;
                    let mut it = l.splitn(3, char::is_whitespace);
                    let _dim: u32 = parse_num(it.next(), pl, "physical dimension")?;
                    let tag: i64 = parse_num(it.next(), pl, "physical tag")?;
                    let name = it
                        .next()
                        .map(|s| s.trim().trim_matches('"').to_string())
                        .ok_or_else(|| Error::Parse {
                            line: pl,
                            message: "missing physical name".into(),
                        })?;
                    names.insert(tag, name);
                }
                lines.expect_end("PhysicalNames")?;
            }
            "$Nodes" => {
                let n = parse_count(&mut lines, "node")?;
                for _ in 0..n {
                    let (nl, l) = lines.expect("node")?;
                    let mut it = l.split_whitespace();
                    let id: usize = parse_num(it.next(), nl, "node id")?;
                    let x: f64 = parse_num(it.next(), nl, "node x")?;
                    let y: f64 = parse_num(it.next(), nl, "node y")?;
                    let _z: f64 = parse_num(it.next(), nl, "node z")?;
                    node_index.insert(id, nodes.len());
                    nodes.push((id, [x, y]));
                }
                lines.expect_end("Nodes")?;
            }
            "$Elements" => {
                let n = parse_count(&mut lines, "element")?;
                for _ in 0..n {
                    let (el, l) = lines.expect("element")?;
                    let toks: Vec<&str> = l.split_whitespace().collect();
                    let mut it = toks.iter().copied();
                    let _id: usize = parse_num(it.next(), el, "element id")?;
                    let ty: u32 = parse_num(it.next(), el, "element type")?;
                    let ntags: usize = parse_num(it.next(), el, "tag count")?;
                    let tags: Vec<i64> = (0..ntags)
                        .map(|_| parse_num(it.next(), el, "element tag"))
                        .collect::<Result<_>>()?;
                    let n_nodes = match ty {
                        1 => 2,
                        2 => 3,
                        other => {
                            return Err(Error::UnsupportedElement {
                                line: el,
                                element_type: other,
                            })
                        }
                    };
                    let ids: Vec<usize> = (0..n_nodes)
                        .map(|_| parse_num(it.next(), el, "element node"))
                        .collect::<Result<_>>()?;
                    if it.next().is_some() {
                        return Err(Error::Parse {
                            line: el,
                            message: "trailing tokens in element line".into(),
                        });
                    }
                    let local: Vec<usize> = ids
                        .iter()
                        .map(|id| {
                            node_index.get(id).copied().ok_or_else(|| Error::Parse {
                                line: el,
                                message: format!("element references unknown node {id}"),
                            })
                        })
                        .collect::<Result<_>>()?;
                    if ty == 1 {
                        let phys = *tags.first().ok_or_else(|| Error::Parse {
                            line: el,
                            message: "line element without physical tag".into(),
                        })?;
                        lines_tagged.push((el, [local[0], local[1]], phys));
                    } else {
                        triangles.push([local[0], local[1], local[2]]);
                    }
                }
                lines.expect_end("Elements")?;
            }
            other if other.starts_with('$') && !other.starts_with("$End") => {
                // Skip unknown sections.
                let section = &other[1..];
                loop {
                    let (_, l) = lines.expect(&format!("$End{section}"))?;
                    if l == format!("$End{section}") {
                        break;
                    }
                }
            }
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected a section header, found '{other}'"),
                })
            }
        }
    }
    if !saw_format {
        return Err(Error::Parse {
            line: 1,
            message: "missing $MeshFormat section".into(),
        });
    }
    if triangles.is_empty() {
        return Err(Error::NoTriangles);
    }

    // Drop nodes not referenced by any triangle, keeping file order.
    let mut used = vec![false; nodes.len()];
    for t in &triangles {
        for &v in t {
            used[v] = true;
        }
    }
    let mut remap = vec![usize::MAX; nodes.len()];
    let mut vertices = Vec::new();
    for (i, (_, p)) in nodes.iter().enumerate() {
        if used[i] {
            remap[i] = vertices.len();
            vertices.push(*p);
        }
    }
    let triangles: Vec<[usize; 3]> = triangles
        .into_iter()
        .map(|t| {
            let t = t.map(|v| remap[v]);
            let area = super::TriangleGeometry::new(t.map(|v| vertices[v])).area;
            if area < 0.0 {
                [t[0], t[2], t[1]]
            } else {
                t
            }
        })
        .collect();

    let mut edge_tags: HashMap<[usize; 2], BoundaryTag> = HashMap::new();
    for (line, [a, b], phys) in lines_tagged {
        let name = names.get(&phys).cloned().unwrap_or_else(|| phys.to_string());
        let tag = *table.get(&name).ok_or_else(|| Error::Parse {
            line,
            message: format!("physical group '{name}' has no boundary tag mapping"),
        })?;
        let (a, b) = (remap[a], remap[b]);
        if a == usize::MAX || b == usize::MAX {
            return Err(Error::Parse {
                line,
                message: "line element uses a node outside the triangulation".into(),
            });
        }
        edge_tags.insert([a.min(b), a.max(b)], tag);
    }
    Mesh::new(vertices, triangles, |[a, b], _| {
        edge_tags
            .get(&[a.min(b), a.max(b)])
            .copied()
            .unwrap_or(BoundaryTag::Wall)
    })
}

/// Writes a mesh as ASCII MSH 2.2 with one physical line group per boundary
/// tag and one physical surface group named `domain`.
pub fn export_gmsh(mesh: &Mesh) -> String {
    let mut groups: BTreeMap<BoundaryTag, i64> = BTreeMap::new();
    for b in mesh.boundary_edges() {
        let next = groups.len() as i64 + 1;
        groups.entry(b.tag).or_insert(next);
    }
    let domain_tag = 100;
    let mut s = String::new();
    s.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n");
    let _ = writeln!(s, "$PhysicalNames\n{}", groups.len() + 1);
    for (tag, id) in &groups {
        let _ = writeln!(s, "1 {id} \"{}\"", tag.name());
    }
    let _ = writeln!(s, "2 {domain_tag} \"domain\"\n$EndPhysicalNames");
    let _ = writeln!(s, "$Nodes\n{}", mesh.n_vertices());
    for (i, p) in mesh.vertices().iter().enumerate() {
        let _ = writeln!(s, "{} {:.17e} {:.17e} 0", i + 1, p[0], p[1]);
    }
    s.push_str("$EndNodes\n");
    let n_el = mesh.boundary_edges().len() + mesh.n_triangles();
    let _ = writeln!(s, "$Elements\n{n_el}");
    let mut id = 1;
    for b in mesh.boundary_edges() {
        let g = groups[&b.tag];
        let _ = writeln!(s, "{id} 1 2 {g} {g} {} {}", b.vertices[0] + 1, b.vertices[1] + 1);
        id += 1;
    }
    for t in mesh.triangles() {
        let _ = writeln!(s, "{id} 2 2 {domain_tag} 1 {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        id += 1;
    }
    s.push_str("$EndElements\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_rect_mesh;

    const UNIT_SQUARE: &str = "$MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
3
1 1 \"interface\"
1 2 \"wall\"
2 3 \"fluid\"
$EndPhysicalNames
$Nodes
4
1 0 0 0
2 1 0 0
3 0 1 0
4 1 1 0
$EndNodes
$Elements
6
1 1 2 1 1 1 2
2 1 2 2 2 2 4
3 1 2 2 3 4 3
4 1 2 2 4 3 1
5 2 2 3 1 1 2 4
6 2 2 3 1 1 4 3
$EndElements
";

    #[test]
    fn unit_square_matches_generator() {
        let m = import_gmsh(UNIT_SQUARE, &default_tag_table()).unwrap();
        let g = generate_rect_mesh(1, 1, (0.0, 1.0, 0.0, 1.0)).unwrap();
        assert_eq!(m, g);
    }

    #[test]
    fn clockwise_triangles_are_reoriented() {
        let text = UNIT_SQUARE.replace("5 2 2 3 1 1 2 4", "5 2 2 3 1 1 4 2");
        let m = import_gmsh(&text, &default_tag_table()).unwrap();
        assert!((0..m.n_triangles()).all(|t| m.signed_area(t) > 0.0));
    }

    #[test]
    fn empty_elements_is_no_triangles() {
        let text = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n1\n1 0 0 0\n$EndNodes\n$Elements\n0\n$EndElements\n";
        assert!(matches!(import_gmsh(text, &default_tag_table()), Err(Error::NoTriangles)));
    }

    #[test]
    fn quadrilateral_rejected() {
        let text = UNIT_SQUARE.replace("6 2 2 3 1 1 4 3", "6 3 2 3 1 1 2 4 3");
        match import_gmsh(&text, &default_tag_table()) {
            Err(Error::UnsupportedElement { element_type: 3, line }) => assert_eq!(line, 24),
            other => panic!("expected unsupported element, got {other:?}"),
        }
    }

    #[test]
    fn malformed_header_names_line() {
        let text = UNIT_SQUARE.replace("$EndNodes", "$EndNodez");
        match import_gmsh(&text, &default_tag_table()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 16),
            other => panic!("expected parse error, got {other:?}"),
        }
        let text = UNIT_SQUARE.replace("4\n1 0 0 0", "four\n1 0 0 0");
        assert!(matches!(import_gmsh(&text, &default_tag_table()), Err(Error::Parse { line: 11, .. })));
    }

    #[test]
    fn unmapped_physical_group_is_an_error() {
        let mut table = default_tag_table();
        table.remove("wall");
        assert!(matches!(import_gmsh(UNIT_SQUARE, &table), Err(Error::Parse { .. })));
    }

    #[test]
    fn export_round_trips() {
        let m = generate_rect_mesh(3, 2, (0.0, 1.0, -1.0, 0.0)).unwrap();
        let back = import_gmsh(&export_gmsh(&m), &default_tag_table()).unwrap();
        assert_eq!(m, back);
    }
}
