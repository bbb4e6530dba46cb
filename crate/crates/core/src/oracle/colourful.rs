use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex, VertexSet};

/// A graph with its vertex set split into `C_0, C_1, .., C_k`. `blocks[0]`
/// is the set to dominate; the others are the colour classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColourfulInstance {
    pub graph: Graph,
    pub blocks: Vec<VertexSet>,
}

impl ColourfulInstance {
    pub fn new(graph: Graph, blocks: Vec<VertexSet>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Input("at least the block C_0 is required".into()));
        }
        let mut seen = vec![false; graph.vertex_count()];
        for b in &blocks {
            for &v in b {
                graph.check_vertex(v)?;
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::Input(format!("vertex {} in two blocks", v + 1)));
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::Input(format!("vertex {} in no block", v + 1)));
        }
        Ok(ColourfulInstance { graph, blocks })
    }

    /// Blocks from a per-vertex colour (colour 0 is `C_0`); `colour_count`
    /// is `k`.
    pub fn from_colours(graph: Graph, colours: &[usize], colour_count: usize) -> Result<Self> {
        if colours.len() != graph.vertex_count() {
            return Err(Error::Input("one colour per vertex expected".into()));
        }
        let mut blocks = vec![VertexSet::new(); colour_count + 1];
        for (v, &c) in colours.iter().enumerate() {
            if c > colour_count {
                return Err(Error::Input(format!("colour {c} exceeds k = {colour_count}")));
            }
            blocks[c].insert(v);
        }
        ColourfulInstance::new(graph, blocks)
    }

    pub fn colour_count(&self) -> usize {
        self.blocks.len() - 1
    }
}

/// A pick of exactly one vertex per colour class dominating `C_0`, found by
/// enumerating the product of the classes in order. Branches where some
/// undominated vertex of `C_0` has no neighbour in a remaining class are cut.
pub fn colourful_ds_exact(c: &ColourfulInstance) -> Option<Vec<Vertex>> {
    let g = &c.graph;
    let k = c.colour_count();
    let targets: Vec<Vertex> = c.blocks[0].iter().copied().collect();
    let mut colour = vec![0usize; g.vertex_count()];
    for (i, b) in c.blocks.iter().enumerate() {
        for &v in b {
            colour[v] = i;
        }
    }
    // last colour class that can still dominate each target
    let last_class: Vec<usize> = targets
        .iter()
        .map(|&t| g.neighbors(t).iter().map(|&w| colour[w]).max().unwrap_or(0))
        .collect();
    let mut target_pos = vec![usize::MAX; g.vertex_count()];
    for (i, &t) in targets.iter().enumerate() {
        target_pos[t] = i;
    }
    let classes: Vec<Vec<Vertex>> = c.blocks[1..].iter().map(|b| b.iter().copied().collect()).collect();
    let mut search = Search {
        g,
        classes: &classes,
        targets: &targets,
        target_pos: &target_pos,
        last_class: &last_class,
        hits: vec![0; targets.len()],
        pick: Vec::with_capacity(k),
    };
    search.run(1).then(|| search.pick.clone())
}

struct Search<'a> {
    g: &'a Graph,
    classes: &'a [Vec<Vertex>],
    targets: &'a [Vertex],
    target_pos: &'a [usize],
    last_class: &'a [usize],
    hits: Vec<u32>,
    pick: Vec<Vertex>,
}

impl Search<'_> {
    /// `next` is the 1-based index of the class to pick from.
    fn run(&mut self, next: usize) -> bool {
        if self
            .targets
            .iter()
            .enumerate()
            .any(|(i, _)| self.hits[i] == 0 && self.last_class[i] < next)
        {
            return false;
        }
        if next > self.classes.len() {
            return true;
        }
        for &v in &self.classes[next - 1] {
            self.toggle(v, true);
            self.pick.push(v);
            if self.run(next + 1) {
                return true;
            }
            self.pick.pop();
            self.toggle(v, false);
        }
        false
    }

    fn toggle(&mut self, v: Vertex, on: bool) {
        for &w in self.g.neighbors(v) {
            let p = self.target_pos[w];
            if p != usize::MAX {
                if on {
                    self.hits[p] += 1;
                } else {
                    self.hits[p] -= 1;
                }
            }
        }
    }
}
