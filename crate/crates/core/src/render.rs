//! Natural-language rendering of rooms, inventory and objects.
//!
//! Templates are fixed so identical states always render to identical bytes.

use std::fmt::Write;

use crate::world::{Direction, GameObject, ObjId, ObjectKind, Openness, Parent, WorldState};

const CONNECTIVES: [&str; 4] = [
    "In one part of the room you see",
    "There is also",
    "You also see",
    "In another part of the room you see",
];

pub const EMPTY_INVENTORY: &str = "Your inventory is empty.";

/// Name with preparation adjectives, e.g. "diced fried purple potato" or
/// "raw purple potato".
pub fn write_display_name(out: &mut String, obj: &GameObject) {
    if obj.kind == ObjectKind::Ingredient {
        let cut = obj.cut.adjective();
        let cook = obj.cook.adjective();
        if let Some(c) = cut {
            out.push_str(c);
            out.push(' ');
        }
        if let Some(c) = cook {
            out.push_str(c);
            out.push(' ');
        }
        if cut.is_none() && cook.is_none() && obj.entry.flags.raw_label {
            out.push_str("raw ");
        }
    }
    out.push_str(obj.name());
}

pub fn display_name(obj: &GameObject) -> String {
    let mut s = String::new();
    write_display_name(&mut s, obj);
    s
}

fn write_with_article(out: &mut String, obj: &GameObject) {
    let start = out.len();
    out.push_str("a ");
    write_display_name(out, obj);
    if out.as_bytes().get(start + 2).is_some_and(|b| b"aeiou".contains(b)) {
        out.replace_range(start..start + 2, "an ");
    }
}

/// "a X", "a X, and a Y", "a X, a Y, and a Z".
fn write_list(out: &mut String, world: &WorldState, ids: &[ObjId]) {
    let n = ids.len();
    for (i, &id) in ids.iter().enumerate() {
        if i > 0 {
            out.push_str(if i + 1 == n { ", and " } else { ", " });
        }
        write_with_article(out, world.obj(id));
    }
}

/// The descriptive clause used in room descriptions and by `examine`.
pub fn write_clause(out: &mut String, world: &WorldState, id: ObjId) {
    let obj = world.obj(id);
    write_with_article(out, obj);
    match (obj.kind, obj.openness) {
        (ObjectKind::Container, Openness::NotOpenable) => {
            if obj.contents.is_empty() {
                out.push_str(", that has nothing on it");
            } else {
                out.push_str(" that has ");
                write_list(out, world, &obj.contents);
                out.push_str(" on it");
            }
        }
        (_, Openness::Closed) => out.push_str(" that is closed"),
        (ObjectKind::Container, Openness::Open) => {
            if obj.contents.is_empty() {
                out.push_str(" that is open and empty");
            } else {
                out.push_str(" that is open and contains ");
                write_list(out, world, &obj.contents);
            }
        }
        (_, Openness::Open) => out.push_str(" that is open"),
        _ => {}
    }
}

/// "The fridge contains a carton of milk." / "The fridge is empty."
pub fn write_contents_sentence(out: &mut String, world: &WorldState, id: ObjId) {
    let obj = world.obj(id);
    let _ = write!(out, "The {}", obj.name());
    if obj.contents.is_empty() {
        out.push_str(" is empty.");
    } else {
        out.push_str(" contains ");
        write_list(out, world, &obj.contents);
        out.push('.');
    }
}

pub fn write_observation(out: &mut String, world: &WorldState) {
    let here = world.here();
    let _ = write!(out, "You are in the {}.", here.kind.name());
    for (i, &id) in here.objects.iter().enumerate() {
        out.push(' ');
        out.push_str(CONNECTIVES[i % CONNECTIVES.len()]);
        out.push(' ');
        write_clause(out, world, id);
        out.push('.');
    }
    let mut first = true;
    for dir in Direction::ALL {
        let Some(exit) = here.exit(dir) else { continue };
        out.push(if first { '\n' } else { ' ' });
        first = false;
        let dest = world.loc(exit.to).kind.name();
        let _ = write!(out, "To the {} you see ", dir.title());
        match exit.door.map(|d| world.obj(d)) {
            Some(door) if door.openness == Openness::Closed => {
                let _ = write!(out, "a closed {}.", door.name());
            }
            Some(door) => {
                let _ = write!(out, "the {dest} through an open {}.", door.name());
            }
            None => {
                let _ = write!(out, "the {dest}.");
            }
        }
    }
}

/// Room sentence, one clause per top-level object, then exits in
/// north/east/south/west order.
pub fn render_observation(world: &WorldState) -> String {
    let mut s = String::with_capacity(512);
    write_observation(&mut s, world);
    s
}

pub fn write_inventory(out: &mut String, world: &WorldState) {
    if world.inventory.is_empty() {
        out.push_str(EMPTY_INVENTORY);
        return;
    }
    out.push_str("Inventory:");
    for &id in &world.inventory {
        out.push_str("\n  ");
        write_with_article(out, world.obj(id));
    }
}

pub fn render_inventory(world: &WorldState) -> String {
    let mut s = String::with_capacity(64);
    write_inventory(&mut s, world);
    s
}

/// Appends every object the agent can currently reach: inventory, the
/// room's top-level objects, contents of open containers and surfaces
/// (recursively), and doors on the room's exits.
pub fn collect_visible(world: &WorldState, out: &mut Vec<ObjId>) {
    fn descend(world: &WorldState, id: ObjId, out: &mut Vec<ObjId>) {
        out.push(id);
        let obj = world.obj(id);
        if obj.is_accessible_container() {
            for &c in &obj.contents {
                descend(world, c, out);
            }
        }
    }
    for &id in &world.inventory {
        descend(world, id, out);
    }
    let here = world.here();
    for &id in &here.objects {
        descend(world, id, out);
    }
    for dir in Direction::ALL {
        if let Some(door) = here.exit(dir).and_then(|e| e.door) {
            out.push(door);
        }
    }
}

pub fn visible_objects(world: &WorldState) -> Vec<ObjId> {
    let mut v = Vec::new();
    collect_visible(world, &mut v);
    v
}

/// Upward check, independent of [`collect_visible`]: walks the parent chain.
pub fn is_visible(world: &WorldState, id: ObjId) -> bool {
    let Some(obj) = world.objects.get(id.index()) else { return false };
    match obj.parent {
        Parent::Inventory => true,
        Parent::Location(l) => l == world.agent_location,
        Parent::Object(c) => world.obj(c).is_accessible_container() && is_visible(world, c),
        Parent::Doorway(..) => world.here().exits.iter().flatten().any(|e| e.door == Some(id)),
        Parent::Consumed => false,
    }
}
