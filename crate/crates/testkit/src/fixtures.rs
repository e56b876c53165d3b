use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sereni_core::model::{Memory, MemoryCategory, Role, UserProfile};

pub const OTHER_OWNER: &str = "someone-else";

#[derive(Debug, Clone)]
pub struct Fixture {
    pub profile: UserProfile,
    pub memories: Vec<Memory>,
}

impl Fixture {
    pub fn memory(&self, id: &str) -> &Memory {
        self.memories
            .iter()
            .find(|m| m.memory_id.as_str() == id)
            .unwrap_or_else(|| panic!("fixture has no memory {id}"))
    }
}

pub fn senior(id: &str, name: &str, birth_year: Option<i32>) -> UserProfile {
    UserProfile {
        user_id: id.into(),
        display_name: name.into(),
        birth_year,
        role: Role::Senior,
    }
}

/// Maria, born 1920: four seaside places, four singers, and a wedding in
/// 1945.
pub fn worked_example() -> Fixture {
    let u = "maria";
    let place = |id: &str, title: &str, text: &str, detail: &str| {
        Memory::new(id, u, MemoryCategory::Places, title)
            .with_description(text)
            .with_detail(detail)
    };
    let singer = |id: &str, title: &str, text: &str, song: &str, artist: &str| {
        Memory::new(id, u, MemoryCategory::Music, title)
            .with_description(text)
            .with_detail(artist)
            .with_music(song, artist, Some(&format!("media/{id}.mp3")))
    };
    Fixture {
        profile: senior(u, "Maria Rossi", Some(1920)),
        memories: vec![
            place(
                "place-summer",
                "Summer holidays",
                "When I was 12 years old I used to spend summer time in Marina di Pisa",
                "Marina di Pisa",
            )
            .with_age(12),
            place(
                "place-cycling",
                "Cycling with my cousins",
                "On Sundays we cycled along the pine wood to Tirrenia",
                "Tirrenia",
            ),
            place(
                "place-school",
                "The school trip",
                "Our teacher took the whole class to San Vincenzo by train",
                "San Vincenzo",
            ),
            place(
                "place-fishing",
                "Fishing with grandfather",
                "Grandfather kept his boat at Castiglioncello",
                "Castiglioncello",
            ),
            singer(
                "song-car",
                "Car trips",
                "I used to listen to that singer when I travelled by car with my father",
                "Nel blu dipinto di blu",
                "Modugno",
            ),
            singer(
                "song-dance",
                "Saturday dances",
                "At the dance hall everybody asked for Morandi",
                "Fatti mandare dalla mamma",
                "Morandi",
            ),
            singer(
                "song-radio",
                "The kitchen radio",
                "Mother sang along with Celentano while cooking",
                "Azzurro",
                "Celentano",
            ),
            singer(
                "song-records",
                "My brother's records",
                "My brother played Guccini all evening",
                "Dio è morto",
                "Guccini",
            ),
            Memory::new("wedding", u, MemoryCategory::Affections, "got married")
                .with_description("I got married to Giovanni in the church of San Frediano")
                .with_age(25),
        ],
    }
}

/// [`worked_example`] plus enough material for every game type.
pub fn five_game_user() -> Fixture {
    let mut f = worked_example();
    let u = f.profile.user_id.clone();
    f.memories.extend([
        Memory::new("hobby-sauce", u.clone(), MemoryCategory::Hobbies, "Tomato sauce")
            .with_description("Every August we made tomato sauce for the whole year")
            .with_steps([
                "wash the tomatoes",
                "boil them briefly",
                "pass them through the mill",
                "fill and seal the jars",
            ]),
        Memory::new("game-cards", u.clone(), MemoryCategory::Games, "Playing briscola")
            .with_description("Grandfather taught me briscola at the bar")
            .with_age(8),
        Memory::new("event-tv", u, MemoryCategory::Events, "watched the first television broadcast")
            .with_description("The whole street came to our house to watch")
            .with_age(34),
    ]);
    f
}

const PLACES: &[&str] = &[
    "Marina di Pisa",
    "Tirrenia",
    "San Vincenzo",
    "Castiglioncello",
    "Viareggio",
    "Forte dei Marmi",
    "Lucca",
    "Siena",
    "Volterra",
    "Livorno",
    "Piombino",
    "Cecina",
    "Elba",
    "Capri",
    "Amalfi",
    "Sorrento",
    "Rimini",
    "Riccione",
    "Cortina",
    "Lake Como",
    "Lake Garda",
    "Portofino",
    "Assisi",
    "Orvieto",
    "Ravenna",
    "Verona",
    "Trieste",
];

const PLACE_TITLES: &[&str] = &[
    "Summer holidays",
    "The school trip",
    "Our honeymoon",
    "Visiting my aunt",
    "My first job",
    "Sunday walks",
    "Cycling with friends",
    "The family picnic",
    "Winter holidays",
    "Fishing trips",
    "The pilgrimage",
    "Military service",
    "Grandmother's house",
];

const PEOPLE: &[&str] = &[
    "Giovanni", "Lucia", "Franco", "Rosa", "Antonio", "Teresa", "Luigi", "Anna", "Carlo", "Giulia", "Pietro", "Elena",
];

const AFFECTION_TITLES: &[&str] = &[
    "got married",
    "met my best friend",
    "had my first dance",
    "became a mother",
    "moved in with my sister",
    "went to my first communion",
    "met my godfather",
    "wrote my first love letter",
];

const HOBBIES: &[(&str, &[&str])] = &[
    (
        "Tomato sauce",
        &["wash the tomatoes", "boil them briefly", "pass them through the mill", "fill and seal the jars"],
    ),
    ("Knitting a scarf", &["choose the wool", "cast on the stitches", "knit the rows", "cast off"]),
    ("Fresh pasta", &["make a well of flour", "break in the eggs", "knead the dough", "roll it thin", "cut the tagliatelle"]),
    ("The vegetable garden", &["dig the soil", "sow the seeds", "water every evening"]),
    ("Baking bread", &["mix flour and yeast", "let the dough rise", "shape the loaves", "bake in the oven"]),
    ("Fixing the bicycle", &["turn the bicycle over", "remove the wheel", "patch the tube"]),
    ("Making wine", &["pick the grapes", "crush them", "let the must ferment", "fill the barrels"]),
    ("Embroidery", &["draw the pattern", "stretch the cloth", "stitch the outline", "fill the flowers"]),
    ("Going fishing", &["prepare the rod"]),
    ("Playing the accordion", &["open the case", "strap it on"]),
];

const SONGS: &[(&str, &str)] = &[
    ("Nel blu dipinto di blu", "Modugno"),
    ("Fatti mandare dalla mamma", "Morandi"),
    ("Azzurro", "Celentano"),
    ("Dio è morto", "Guccini"),
    ("Il cielo in una stanza", "Mina"),
    ("Vecchio frack", "Buongusto"),
    ("Arrivederci Roma", "Rascel"),
    ("Grazie dei fiori", "Nilla Pizzi"),
    ("La bambola", "Patty Pravo"),
    ("Una lacrima sul viso", "Bobby Solo"),
    ("Il ragazzo della via Gluck", "Adriano"),
    ("Emozioni", "Battisti"),
];

const EVENT_TITLES: &[&str] = &[
    "watched the moon landing on television",
    "bought our first car",
    "saw the sea for the first time",
    "started school",
    "opened the shop",
    "went to the cinema alone",
];

const GAME_TITLES: &[&str] = &["Playing briscola", "Hide and seek in the courtyard", "Bocce on Sundays", "Tombola at Christmas"];

struct Shape {
    places: (usize, usize),
    affections: (usize, usize),
    hobbies: (usize, usize),
    songs: (usize, usize),
    audio: f64,
    no_birth_year: f64,
}

/// A random user with arbitrary, possibly thin material, plus memories of
/// another user mixed into the list.
pub fn random_user(seed: u64) -> Fixture {
    build(
        seed,
        &Shape {
            places: (0, 9),
            affections: (0, 6),
            hobbies: (0, 4),
            songs: (0, 6),
            audio: 0.7,
            no_birth_year: 0.1,
        },
    )
}

/// A random user with plenty of material for a full-length session.
pub fn rich_user(seed: u64) -> Fixture {
    build(
        seed,
        &Shape {
            places: (6, 12),
            affections: (4, 8),
            hobbies: (3, 6),
            songs: (4, 8),
            audio: 0.9,
            no_birth_year: 0.0,
        },
    )
}

fn build(seed: u64, shape: &Shape) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let user = format!("user-{seed}");
    let birth = (!rng.random_bool(shape.no_birth_year)).then(|| rng.random_range(1925..=1960));
    let mut memories = Vec::new();
    for owner in [user.as_str(), OTHER_OWNER] {
        let scale = if owner == OTHER_OWNER { 0.5 } else { 1.0 };
        let count = |rng: &mut ChaCha8Rng, (lo, hi): (usize, usize)| {
            ((rng.random_range(lo..=hi) as f64) * scale).round() as usize
        };
        let mut n = 0;
        let mut next_id = |prefix: &str| {
            n += 1;
            format!("{owner}-{prefix}-{n}")
        };

        let k = count(&mut rng, shape.places);
        let details = pick(&mut rng, PLACES, k);
        let titles = pick(&mut rng, PLACE_TITLES, k);
        for (title, detail) in titles.iter().zip(&details) {
            let text = if rng.random_bool(0.8) {
                format!("I remember {} in {detail}, with all the family", title.to_lowercase())
            } else {
                format!("I remember {} very well", title.to_lowercase())
            };
            let mut m = Memory::new(next_id("place"), owner, MemoryCategory::Places, *title)
                .with_description(text)
                .with_detail(*detail);
            if rng.random_bool(0.5) {
                m = m.with_age(rng.random_range(5..=70));
            }
            memories.push(m);
        }

        let k = count(&mut rng, shape.affections);
        let people = pick(&mut rng, PEOPLE, k);
        let titles = pick(&mut rng, AFFECTION_TITLES, k);
        for (title, person) in titles.iter().zip(&people) {
            memories.push(
                Memory::new(next_id("affection"), owner, MemoryCategory::Affections, *title)
                    .with_description(format!("I {title}, and {person} was there"))
                    .with_detail(*person)
                    .with_age(rng.random_range(5..=80)),
            );
        }

        let k = count(&mut rng, shape.hobbies);
        let eligible: Vec<_> = HOBBIES.iter().filter(|(_, s)| s.len() >= 3).collect();
        let thin: Vec<_> = HOBBIES.iter().filter(|(_, s)| s.len() < 3).collect();
        let mut hobbies: Vec<_> = eligible.choose_multiple(&mut rng, k).copied().collect();
        if rng.random_bool(0.3) {
            hobbies.extend(thin.choose(&mut rng).copied());
        }
        for (title, steps) in hobbies {
            memories.push(
                Memory::new(next_id("hobby"), owner, MemoryCategory::Hobbies, *title)
                    .with_description(format!("{title} was what I loved most"))
                    .with_steps(steps.iter().copied()),
            );
        }

        let k = count(&mut rng, shape.songs);
        let songs: Vec<_> = SONGS.choose_multiple(&mut rng, k).collect();
        for (title, artist) in songs {
            let id = next_id("song");
            let audio = rng.random_bool(shape.audio).then(|| format!("media/{id}.mp3"));
            memories.push(
                Memory::new(id, owner, MemoryCategory::Music, format!("Listening to {artist}"))
                    .with_description(format!("We always sang {title} together"))
                    .with_detail(*artist)
                    .with_music(*title, *artist, audio.as_deref()),
            );
        }

        let k = rng.random_range(0..=3);
        for title in pick(&mut rng, EVENT_TITLES, k) {
            let mut m = Memory::new(next_id("event"), owner, MemoryCategory::Events, title);
            if rng.random_bool(0.8) {
                m = m.with_age(rng.random_range(3..=75));
            }
            memories.push(m);
        }
        let k = rng.random_range(0..=2);
        for title in pick(&mut rng, GAME_TITLES, k) {
            memories.push(
                Memory::new(next_id("game"), owner, MemoryCategory::Games, title).with_age(rng.random_range(5..=15)),
            );
        }
    }
    memories.shuffle(&mut rng);
    Fixture {
        profile: senior(&user, &format!("Senior {seed}"), birth),
        memories,
    }
}

fn pick<'a>(rng: &mut ChaCha8Rng, from: &[&'a str], k: usize) -> Vec<&'a str> {
    from.choose_multiple(rng, k.min(from.len())).copied().collect()
}
