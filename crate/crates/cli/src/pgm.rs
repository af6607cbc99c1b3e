//! Plain (P2) PGM writing for binarized digit images.

/// Renders one grayscale image (values in `[0, 1]`) as plain PGM.
pub fn image_to_pgm(pixels: &[f64], width: usize, height: usize) -> String {
    assert_eq!(pixels.len(), width * height, "pixel count mismatch");
    let mut out = format!("P2\n{width} {height}\n255\n");
    for row in pixels.chunks(width) {
        let line: Vec<String> = row
            .iter()
            .map(|&p| ((p.clamp(0.0, 1.0) * 255.0).round() as u8).to_string())
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Lays out images side by side (with a 1-pixel separator column) and
/// renders the grid as plain PGM. All images must share the given size.
pub fn grid_to_pgm(images: &[Vec<f64>], width: usize, height: usize, columns: usize) -> String {
    assert!(!images.is_empty());
    let columns = columns.min(images.len());
    let rows = images.len().div_ceil(columns);
    let grid_w = columns * width + (columns - 1);
    let grid_h = rows * height + (rows - 1);
    let mut pixels = vec![0.5; grid_w * grid_h];
    for (index, image) in images.iter().enumerate() {
        assert_eq!(image.len(), width * height, "grid image size mismatch");
        let (gr, gc) = (index / columns, index % columns);
        let origin_y = gr * (height + 1);
        let origin_x = gc * (width + 1);
        for y in 0..height {
            for x in 0..width {
                pixels[(origin_y + y) * grid_w + origin_x + x] = image[y * width + x];
            }
        }
    }
    image_to_pgm(&pixels, grid_w, grid_h)
}
