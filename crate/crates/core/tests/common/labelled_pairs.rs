use augbias::taxonomy::Category::{self, *};

/// One labelled row: affected class, partner, C_kl, IoU, Wu-Palmer,
/// embedding similarity, and the admissible categories.
pub struct Row {
    pub class: &'static str,
    pub partner: &'static str,
    pub c_kl: f64,
    pub iou: f64,
    pub wn: f64,
    pub emb: Option<f64>,
    pub labels: &'static [Category],
}

const fn row(
    class: &'static str,
    partner: &'static str,
    c_kl: f64,
    iou: f64,
    wn: f64,
    emb: Option<f64>,
    labels: &'static [Category],
) -> Row {
    Row { class, partner, c_kl, iou, wn, emb, labels }
}

/// Rows with a category label; the one unlabelled row is left out.
pub const ROWS: &[Row] = &[
    row("overskirt", "hoopskirt", 0.31, 0.17, 0.91, None, &[FineGrained, Ambiguous]),
    row("overskirt", "bonnet", 0.03, 0.02, 0.73, Some(0.32), &[FineGrained]),
    row("overskirt", "gown", 0.50, 0.21, 0.73, Some(0.37), &[FineGrained, Ambiguous]),
    row("overskirt", "trench coat", 0.00, 0.00, 0.75, Some(0.42), &[FineGrained]),
    row("academic gown", "mortarboard", 0.72, 0.50, 0.73, Some(0.10), &[CoOccurring]),
    row("sunglass", "sunglasses", 0.87, 0.81, 0.64, Some(0.84), &[Ambiguous]),
    row("maillot", "maillot", 0.73, 0.63, 0.70, Some(1.00), &[Ambiguous]),
    row("Windsor tie", "suit", 0.61, 0.32, 0.82, Some(0.24), &[CoOccurring]),
    row("screen", "desktop computer", 0.59, 0.29, 0.64, Some(0.62), &[Ambiguous]),
    row("screen", "monitor", 0.87, 0.37, 0.63, Some(0.44), &[Ambiguous]),
    row("tobacco shop", "barbershop", 0.00, 0.00, 0.91, Some(0.56), &[FineGrained]),
    row("tobacco shop", "bookshop", 0.00, 0.00, 0.91, Some(0.53), &[FineGrained]),
    row("monastery", "church", 0.11, 0.03, 0.70, Some(0.71), &[FineGrained]),
    row("monastery", "castle", 0.00, 0.00, 0.60, Some(0.69), &[FineGrained]),
    row("thresher", "harvester", 0.04, 0.01, 0.90, Some(0.49), &[FineGrained]),
    row("parallel bars", "horizontal bar", 0.00, 0.00, 0.90, Some(0.75), &[FineGrained]),
    row("parallel bars", "balance beam", 0.02, 0.01, 0.90, Some(0.45), &[FineGrained]),
    row("mailbag", "purse", 0.10, 0.06, 0.89, Some(0.19), &[FineGrained]),
    row("mailbag", "backpack", 0.00, 0.00, 0.89, Some(0.16), &[FineGrained]),
    row("chain", "necklace", 0.15, 0.09, 0.53, Some(0.31), &[Ambiguous]),
    row("bulletproof vest", "military uniform", 0.31, 0.13, 0.76, Some(0.38), &[CoOccurring, Ambiguous]),
    row("bulletproof vest", "assault rifle", 0.32, 0.17, 0.40, Some(0.35), &[CoOccurring]),
    row("sombrero", "cowboy hat", 0.15, 0.05, 0.91, Some(0.51), &[FineGrained]),
    row("velvet", "purse", 0.00, 0.00, 0.62, Some(0.29), &[Unrelated]),
    row("velvet", "necklace", 0.00, 0.00, 0.62, Some(0.51), &[Unrelated]),
    row("tape player", "radio", 0.00, 0.00, 0.67, Some(0.27), &[FineGrained]),
    row("tape player", "cassette player", 0.08, 0.01, 0.89, Some(0.85), &[FineGrained]),
    row("assault rifle", "military uniform", 0.47, 0.24, 0.42, Some(0.42), &[CoOccurring]),
    row("cornet", "trombone", 0.23, 0.14, 0.91, Some(0.41), &[FineGrained]),
    row("pole", "traffic light", 0.05, 0.03, 0.12, Some(0.21), &[Unrelated]),
    row("muzzle", "sandal", 0.00, 0.00, 0.56, Some(0.23), &[Unrelated]),
    row("ear", "corn", 0.81, 0.52, 0.78, Some(0.23), &[Ambiguous]),
    row("vault", "altar", 0.21, 0.12, 0.62, Some(0.41), &[FineGrained, Ambiguous]),
    row("frying pan", "Dutch oven", 0.00, 0.00, 0.40, Some(0.59), &[FineGrained]),
    row("frying pan", "wok", 0.09, 0.05, 0.92, Some(0.72), &[FineGrained]),
    row("French loaf", "bakery", 0.10, 0.06, 0.24, Some(0.42), &[CoOccurring]),
    row("barrel", "rain barrel", 0.16, 0.07, 0.76, Some(0.70), &[FineGrained, Ambiguous]),
    row("spatula", "wooden spoon", 0.24, 0.12, 0.57, Some(0.62), &[FineGrained]),
    row("sax", "flute", 0.00, 0.00, 0.83, Some(0.65), &[FineGrained]),
    row("seashore", "sandbar", 0.64, 0.47, 0.57, Some(0.69), &[CoOccurring]),
    row("coffee mug", "cup", 0.61, 0.34, 0.19, Some(0.63), &[Ambiguous]),
    row("coffee mug", "espresso", 0.18, 0.13, 0.21, Some(0.72), &[CoOccurring]),
    row("breastplate", "cuirass", 0.71, 0.50, 0.67, Some(0.48), &[Ambiguous]),
    row("beacon", "breakwater", 0.07, 0.04, 0.71, Some(0.33), &[CoOccurring]),
    row("suit", "miniskirt", 0.02, 0.01, 0.86, Some(0.32), &[FineGrained]),
    row("hand-held computer", "cellular telephone", 0.22, 0.06, 0.50, Some(0.42), &[Ambiguous]),
    row("hand-held computer", "notebook", 0.03, 0.01, 0.92, Some(0.32), &[FineGrained]),
    row("stopwatch", "digital watch", 0.00, 0.00, 0.83, Some(0.62), &[FineGrained]),
    row("strawberry", "trifle", 0.06, 0.03, 0.32, Some(0.40), &[CoOccurring]),
    row("trimaran", "catamaran", 0.18, 0.09, 0.92, Some(0.60), &[FineGrained]),
    row("digital clock", "digital watch", 0.02, 0.01, 0.83, Some(0.71), &[FineGrained]),
    row("hair slide", "necklace", 0.00, 0.00, 0.50, Some(0.42), &[FineGrained]),
    row("hook", "necklace", 0.00, 0.00, 0.53, Some(0.33), &[Unrelated]),
    row("backpack", "purse", 0.02, 0.01, 0.89, Some(0.56), &[FineGrained]),
    row("home theater", "monitor", 0.03, 0.00, 0.56, Some(0.18), &[CoOccurring]),
    row("bath towel", "pillow", 0.00, 0.00, 0.59, Some(0.56), &[Unrelated]),
];
