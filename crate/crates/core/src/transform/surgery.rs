use std::collections::{BTreeSet, VecDeque};

use super::{LinkInfo, NodeKind, Side, Split, TransformError, VNodeId, VirtualGraph};
use crate::network::Role;

impl VirtualGraph {
    /// Adds a unit link `tail → head`; either endpoint may be a new node.
    /// Returns the id of the new link.
    ///
    /// Only the gadgets of `tail` and `head` change: every affected reserve
    /// leaf is split into a connection leaf and a fresh reserve, and the two
    /// trees of the new link are created. Existing depths stay as they are.
    pub fn join_link(&mut self, tail: &str, head: &str) -> Result<String, TransformError> {
        if head == self.source {
            return Err(TransformError::SourceInLink);
        }
        if !self.gadgets.contains_key(tail) && !self.gadgets.contains_key(head) {
            return Err(TransformError::UnknownNode(format!("{tail} and {head}")));
        }
        if tail == head || self.reaches(head, tail) {
            return Err(TransformError::WouldCycle(format!("{tail} -> {head}")));
        }
        for v in [tail, head] {
            if !self.gadgets.contains_key(v) {
                self.gadgets.insert(v.to_string(), super::Gadget::new(Role::Internal));
                self.gadget_order.push(v.to_string());
            }
        }
        let link = format!("j{}", self.joins);
        self.joins += 1;
        let before: BTreeSet<VNodeId> = self.nodes.keys().copied().collect();

        if tail == self.source {
            self.add_source_copy(&link);
        } else {
            let ins = self.in_links(tail);
            self.build_tree(tail, &link, Side::Out, &ins);
            for a in &ins {
                let c = self.split_reserve(tail, a, Side::In, &link);
                let leaf = self.conn_of(tail, &link, Side::Out, a);
                self.add_edge(c, leaf, super::EdgeKind::Cross, None);
            }
        }
        let outs = self.out_links(head);
        self.build_tree(head, &link, Side::In, &outs);
        for b in &outs {
            let c = self.split_reserve(head, b, Side::Out, &link);
            let leaf = self.conn_of(head, &link, Side::In, b);
            self.add_edge(leaf, c, super::EdgeKind::Cross, None);
        }

        self.link_order.push(link.clone());
        self.links.insert(link.clone(), LinkInfo { tail: tail.into(), head: head.into(), edge: usize::MAX });
        self.wire_link(&link);

        let created: BTreeSet<VNodeId> = self.nodes.keys().filter(|n| !before.contains(n)).copied().collect();
        self.assign_depths(&created);
        self.refresh_active();
        Ok(link)
    }

    /// Removes a unit link together with its two trees. Connection leaves
    /// that pointed at it are folded back into their reserve when possible
    /// and otherwise marked dead.
    pub fn leave_link(&mut self, link: &str) -> Result<(), TransformError> {
        let info = self.links.remove(link).ok_or_else(|| TransformError::UnknownEdge(link.to_string()))?;
        self.link_order.retain(|l| l != link);
        self.remove_edge(info.edge);

        if info.tail == self.source {
            let g = self.gadgets.get_mut(&info.tail).unwrap();
            let pos = g.source_copies.iter().position(|(l, _)| l == link).expect("source copy");
            let (_, copy) = g.source_copies.remove(pos);
            self.remove_node(copy);
        } else {
            self.drop_tree(&info.tail, link, Side::Out);
            let partners: Vec<String> = self.gadgets[&info.tail].in_trees.iter().map(|(l, _)| l.clone()).collect();
            for a in partners {
                self.detach(&info.tail, &a, Side::In, link);
            }
        }
        self.drop_tree(&info.head, link, Side::In);
        let partners: Vec<String> = self.gadgets[&info.head].out_trees.iter().map(|(l, _)| l.clone()).collect();
        for b in partners {
            self.detach(&info.head, &b, Side::Out, link);
        }
        self.refresh_active();
        Ok(())
    }

    fn reaches(&self, from: &str, to: &str) -> bool {
        let mut seen = BTreeSet::from([from.to_string()]);
        let mut queue = VecDeque::from([from.to_string()]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                return true;
            }
            for l in self.links.values().filter(|l| l.tail == u) {
                if seen.insert(l.head.clone()) {
                    queue.push_back(l.head.clone());
                }
            }
        }
        false
    }

    fn conn_of(&self, v: &str, tree_link: &str, side: Side, partner: &str) -> VNodeId {
        self.tree(v, tree_link, side).conns.iter().find(|(p, _)| p == partner).expect("connection leaf").1
    }

    /// Turns the reserve leaf of a tree into an internal node with a new
    /// connection leaf (for `partner`) and a new reserve as children.
    fn split_reserve(&mut self, v: &str, tree_link: &str, side: Side, partner: &str) -> VNodeId {
        let parent = self.tree(v, tree_link, side).reserve;
        let kind = if side == Side::In { NodeKind::Broadcast } else { NodeKind::Coding };
        self.nodes.get_mut(&parent).unwrap().kind = kind;
        let conn = self.new_node(NodeKind::Connection, v, tree_link, side);
        let reserve = self.new_node(NodeKind::Virtual, v, tree_link, side);
        self.tree_edge(parent, conn, side);
        self.tree_edge(parent, reserve, side);
        let tree = self.tree_mut(v, tree_link, side);
        tree.conns.push((partner.to_string(), conn));
        tree.reserve = reserve;
        self.splits.insert(conn, Split { parent, reserve });
        conn
    }

    fn detach(&mut self, v: &str, tree_link: &str, side: Side, partner: &str) {
        let tree = self.tree_mut(v, tree_link, side);
        let Some(pos) = tree.conns.iter().position(|(p, _)| p == partner) else { return };
        let (_, conn) = tree.conns.remove(pos);
        let current_reserve = tree.reserve;
        match self.splits.get(&conn).cloned() {
            Some(Split { parent, reserve }) if reserve == current_reserve => {
                self.splits.remove(&conn);
                self.remove_node(conn);
                self.remove_node(reserve);
                self.nodes.get_mut(&parent).unwrap().kind = NodeKind::Virtual;
                self.tree_mut(v, tree_link, side).reserve = parent;
            }
            _ => {
                self.nodes.get_mut(&conn).unwrap().dead = true;
            }
        }
    }

    fn drop_tree(&mut self, v: &str, link: &str, side: Side) {
        let g = self.gadgets.get_mut(v).unwrap();
        let list = if side == Side::In { &mut g.in_trees } else { &mut g.out_trees };
        list.retain(|(l, _)| l != link);
        let doomed: Vec<VNodeId> = self
            .nodes
            .iter()
            .filter(|(_, n)| n.origin == v && n.link == link && n.side == side)
            .map(|(&k, _)| k)
            .collect();
        for n in doomed {
            self.splits.remove(&n);
            self.remove_node(n);
        }
    }
}
