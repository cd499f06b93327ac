//! World representation: locations, objects, containment and the agent.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::library::LibraryEntry;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocId(pub u32);

impl ObjId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl LocId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObjectKind {
    Item,
    Container,
    Door,
    Appliance,
    Ingredient,
    Coin,
    Readable,
}

impl ObjectKind {
    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "item" => Self::Item,
            "container" => Self::Container,
            "door" => Self::Door,
            "appliance" => Self::Appliance,
            "ingredient" => Self::Ingredient,
            "coin" => Self::Coin,
            "readable" => Self::Readable,
            _ => return None,
        })
    }

    /// Whether the agent can pick objects of this kind up.
    pub fn is_portable(self) -> bool {
        matches!(self, Self::Item | Self::Ingredient | Self::Coin | Self::Readable)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Openness {
    Open,
    Closed,
    NotOpenable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutState {
    Raw,
    Chopped,
    Sliced,
    Diced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CookState {
    Raw,
    Fried,
    Roasted,
    Barbequed,
}

impl CutState {
    pub fn adjective(self) -> Option<&'static str> {
        match self {
            Self::Raw => None,
            Self::Chopped => Some("chopped"),
            Self::Sliced => Some("sliced"),
            Self::Diced => Some("diced"),
        }
    }

    /// Imperative verb that produces this state.
    pub fn verb(self) -> Option<&'static str> {
        match self {
            Self::Raw => None,
            Self::Chopped => Some("chop"),
            Self::Sliced => Some("slice"),
            Self::Diced => Some("dice"),
        }
    }
}

impl CookState {
    pub fn adjective(self) -> Option<&'static str> {
        match self {
            Self::Raw => None,
            Self::Fried => Some("fried"),
            Self::Roasted => Some("roasted"),
            Self::Barbequed => Some("barbequed"),
        }
    }

    pub fn verb(self) -> Option<&'static str> {
        match self {
            Self::Raw => None,
            Self::Fried => Some("fry"),
            Self::Roasted => Some("roast"),
            Self::Barbequed => Some("barbeque"),
        }
    }

    /// Which appliance produces which cooking state.
    pub fn for_appliance(name: &str) -> Option<Self> {
        match name {
            "stove" => Some(Self::Fried),
            "oven" => Some(Self::Roasted),
            "barbeque" => Some(Self::Barbequed),
            _ => None,
        }
    }

    pub fn appliance(self) -> Option<&'static str> {
        match self {
            Self::Raw => None,
            Self::Fried => Some("stove"),
            Self::Roasted => Some("oven"),
            Self::Barbequed => Some("barbeque"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    North,
    East,
    South,
    West,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Self::North, Self::East, Self::South, Self::West];

    pub fn name(self) -> &'static str {
        match self {
            Self::North => "north",
            Self::East => "east",
            Self::South => "south",
            Self::West => "west",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Self::North => "North",
            Self::East => "East",
            Self::South => "South",
            Self::West => "West",
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Self::North => Self::South,
            Self::East => Self::West,
            Self::South => Self::North,
            Self::West => Self::East,
        }
    }

    /// (row, col) offset on the map grid; north is up.
    pub fn offset(self) -> (i32, i32) {
        match self {
            Self::North => (-1, 0),
            Self::East => (0, 1),
            Self::South => (1, 0),
            Self::West => (0, -1),
        }
    }

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RoomKind {
    #[serde(rename = "kitchen")]
    Kitchen,
    #[serde(rename = "pantry")]
    Pantry,
    #[serde(rename = "backyard")]
    Backyard,
    #[serde(rename = "corridor")]
    Corridor,
    #[serde(rename = "bedroom")]
    Bedroom,
    #[serde(rename = "bathroom")]
    Bathroom,
    #[serde(rename = "living room")]
    LivingRoom,
    #[serde(rename = "laundry room")]
    LaundryRoom,
    #[serde(rename = "driveway")]
    Driveway,
    #[serde(rename = "street")]
    Street,
    #[serde(rename = "supermarket")]
    Supermarket,
}

impl RoomKind {
    pub const ALL: [RoomKind; 11] = [
        Self::Kitchen,
        Self::Pantry,
        Self::Backyard,
        Self::Corridor,
        Self::Bedroom,
        Self::Bathroom,
        Self::LivingRoom,
        Self::LaundryRoom,
        Self::Driveway,
        Self::Street,
        Self::Supermarket,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Kitchen => "kitchen",
            Self::Pantry => "pantry",
            Self::Backyard => "backyard",
            Self::Corridor => "corridor",
            Self::Bedroom => "bedroom",
            Self::Bathroom => "bathroom",
            Self::LivingRoom => "living room",
            Self::LaundryRoom => "laundry room",
            Self::Driveway => "driveway",
            Self::Street => "street",
            Self::Supermarket => "supermarket",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RoomKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where an object currently is. Every live object has exactly one parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parent {
    Location(LocId),
    Object(ObjId),
    Inventory,
    /// A door joining two locations.
    Doorway(LocId, LocId),
    /// Eaten, or folded into a meal.
    Consumed,
}

#[derive(Clone, Debug)]
pub struct GameObject {
    pub id: ObjId,
    pub entry: &'static LibraryEntry,
    pub kind: ObjectKind,
    pub openness: Openness,
    pub cut: CutState,
    pub cook: CookState,
    pub contents: Vec<ObjId>,
    pub parent: Parent,
}

impl GameObject {
    #[inline]
    pub fn name(&self) -> &'static str {
        self.entry.name
    }

    /// Containers whose contents can be seen and reached: open ones and surfaces.
    #[inline]
    pub fn is_accessible_container(&self) -> bool {
        self.kind == ObjectKind::Container && self.openness != Openness::Closed
    }

    #[inline]
    pub fn is_surface(&self) -> bool {
        self.kind == ObjectKind::Container && self.openness == Openness::NotOpenable
    }

    #[inline]
    pub fn is_edible(&self) -> bool {
        self.entry.flags.edible
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exit {
    pub to: LocId,
    pub door: Option<ObjId>,
}

#[derive(Clone, Debug)]
pub struct Location {
    pub id: LocId,
    pub kind: RoomKind,
    pub exits: [Option<Exit>; 4],
    pub objects: Vec<ObjId>,
}

impl Location {
    pub fn exit(&self, dir: Direction) -> Option<Exit> {
        self.exits[dir.index()]
    }
}

/// A reward the game has granted. Each is earned at most once per episode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RewardEvent {
    /// A required ingredient entered the inventory.
    Took(ObjId),
    /// A required ingredient is held and prepared exactly as the recipe asks.
    Ready(ObjId),
    MealPrepared,
    MealEaten,
    /// A household object was put in one of its canonical destinations.
    Placed(ObjId),
    CoinTaken,
}

impl RewardEvent {
    pub fn label(&self, world: &WorldState) -> String {
        match *self {
            Self::Took(o) => format!("take:{}", world.obj(o).name()),
            Self::Ready(o) => format!("ready:{}", world.obj(o).name()),
            Self::MealPrepared => "prepare:meal".to_string(),
            Self::MealEaten => "eat:meal".to_string(),
            Self::Placed(o) => format!("place:{}", world.obj(o).name()),
            Self::CoinTaken => "take:coin".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct WorldState {
    pub locations: Vec<Location>,
    pub objects: Vec<GameObject>,
    pub agent_location: LocId,
    pub inventory: Vec<ObjId>,
    pub step_count: u32,
    pub score_ledger: Vec<RewardEvent>,
    pub failed: bool,
    pub succeeded: bool,
}

impl WorldState {
    pub fn new() -> Self {
        Self {
            locations: Vec::new(),
            objects: Vec::new(),
            agent_location: LocId(0),
            inventory: Vec::new(),
            step_count: 0,
            score_ledger: Vec::new(),
            failed: false,
            succeeded: false,
        }
    }

    #[inline]
    pub fn obj(&self, id: ObjId) -> &GameObject {
        &self.objects[id.index()]
    }

    #[inline]
    pub fn obj_mut(&mut self, id: ObjId) -> &mut GameObject {
        &mut self.objects[id.index()]
    }

    #[inline]
    pub fn loc(&self, id: LocId) -> &Location {
        &self.locations[id.index()]
    }

    #[inline]
    pub fn here(&self) -> &Location {
        self.loc(self.agent_location)
    }

    pub fn is_terminal(&self) -> bool {
        self.succeeded || self.failed
    }

    pub fn find_object(&self, name: &str) -> Option<ObjId> {
        self.objects
            .iter()
            .find(|o| o.parent != Parent::Consumed && o.name() == name)
            .map(|o| o.id)
    }

    pub fn find_location(&self, kind: RoomKind) -> Option<LocId> {
        self.locations.iter().find(|l| l.kind == kind).map(|l| l.id)
    }

    pub fn has_event(&self, event: RewardEvent) -> bool {
        self.score_ledger.contains(&event)
    }

    /// Creates a fresh object from a catalog entry, in its default state,
    /// without placing it anywhere.
    pub fn spawn(&mut self, entry: &'static LibraryEntry) -> ObjId {
        let id = ObjId(self.objects.len() as u32);
        let openness = match (entry.kind, entry.flags.closed) {
            (ObjectKind::Door, _) | (ObjectKind::Container, true) => Openness::Closed,
            _ => Openness::NotOpenable,
        };
        self.objects.push(GameObject {
            id,
            entry,
            kind: entry.kind,
            openness,
            cut: CutState::Raw,
            cook: CookState::Raw,
            contents: Vec::new(),
            parent: Parent::Consumed,
        });
        id
    }

    pub fn add_location(&mut self, kind: RoomKind) -> LocId {
        let id = LocId(self.locations.len() as u32);
        self.locations.push(Location { id, kind, exits: [None; 4], objects: Vec::new() });
        id
    }

    /// Connects two locations both ways, optionally through a door.
    pub fn connect(&mut self, from: LocId, dir: Direction, to: LocId, door: Option<ObjId>) {
        self.locations[from.index()].exits[dir.index()] = Some(Exit { to, door });
        self.locations[to.index()].exits[dir.opposite().index()] = Some(Exit { to: from, door });
        if let Some(d) = door {
            self.obj_mut(d).parent = Parent::Doorway(from.min(to), from.max(to));
        }
    }

    /// Detaches `id` from its current parent and appends it to `parent`.
    pub fn move_to(&mut self, id: ObjId, parent: Parent) {
        match self.obj(id).parent {
            Parent::Location(l) => self.locations[l.index()].objects.retain(|&o| o != id),
            Parent::Object(c) => self.obj_mut(c).contents.retain(|&o| o != id),
            Parent::Inventory => self.inventory.retain(|&o| o != id),
            Parent::Doorway(..) | Parent::Consumed => {}
        }
        match parent {
            Parent::Location(l) => self.locations[l.index()].objects.push(id),
            Parent::Object(c) => self.obj_mut(c).contents.push(id),
            Parent::Inventory => self.inventory.push(id),
            Parent::Doorway(..) | Parent::Consumed => {}
        }
        self.obj_mut(id).parent = parent;
    }

    /// The location an object ultimately sits in, if any.
    pub fn location_of(&self, mut id: ObjId) -> Option<LocId> {
        loop {
            match self.obj(id).parent {
                Parent::Location(l) => return Some(l),
                Parent::Object(c) => id = c,
                Parent::Inventory => return Some(self.agent_location),
                Parent::Doorway(..) | Parent::Consumed => return None,
            }
        }
    }

    /// Checks the structural invariants: containment is a forest whose
    /// parent pointers agree with the child lists, openness matches kind,
    /// preparation states only on ingredients, exits are symmetric.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.agent_location.index() >= self.locations.len() {
            return Err("agent location out of range".into());
        }
        if self.succeeded && self.failed {
            return Err("both succeeded and failed".into());
        }
        let mut seen = vec![0u32; self.objects.len()];
        let mut claim = |o: ObjId, expected: Parent, objs: &[GameObject]| -> Result<(), String> {
            let obj = objs.get(o.index()).ok_or_else(|| format!("dangling object id {}", o.0))?;
            if obj.parent != expected {
                return Err(format!("{} listed under {:?} but parent is {:?}", obj.name(), expected, obj.parent));
            }
            seen[o.index()] += 1;
            Ok(())
        };
        for loc in &self.locations {
            for &o in &loc.objects {
                claim(o, Parent::Location(loc.id), &self.objects)?;
            }
        }
        for &o in &self.inventory {
            claim(o, Parent::Inventory, &self.objects)?;
        }
        for obj in &self.objects {
            for &c in &obj.contents {
                claim(c, Parent::Object(obj.id), &self.objects)?;
            }
        }
        for obj in &self.objects {
            let listed = seen[obj.id.index()];
            match obj.parent {
                Parent::Doorway(..) | Parent::Consumed => {
                    if listed != 0 {
                        return Err(format!("{} is a door or consumed but listed", obj.name()));
                    }
                }
                _ if listed != 1 => return Err(format!("{} listed {} times", obj.name(), listed)),
                _ => {}
            }
            let openable = obj.openness != Openness::NotOpenable;
            if openable && !matches!(obj.kind, ObjectKind::Container | ObjectKind::Door) {
                return Err(format!("{} is openable but not a container or door", obj.name()));
            }
            if obj.kind != ObjectKind::Ingredient && (obj.cut != CutState::Raw || obj.cook != CookState::Raw) {
                return Err(format!("{} is prepared but not an ingredient", obj.name()));
            }
            // Walk up the parent chain to rule out cycles.
            let mut cur = obj.id;
            let mut hops = 0;
            while let Parent::Object(p) = self.obj(cur).parent {
                cur = p;
                hops += 1;
                if hops > self.objects.len() {
                    return Err(format!("containment cycle through {}", obj.name()));
                }
            }
        }
        for loc in &self.locations {
            for dir in Direction::ALL {
                if let Some(exit) = loc.exit(dir) {
                    let back = self.loc(exit.to).exit(dir.opposite());
                    if back != Some(Exit { to: loc.id, door: exit.door }) {
                        return Err(format!("asymmetric exit {} {}", loc.kind, dir.name()));
                    }
                }
            }
        }
        Ok(())
    }
}

impl Default for WorldState {
    fn default() -> Self {
        Self::new()
    }
}
