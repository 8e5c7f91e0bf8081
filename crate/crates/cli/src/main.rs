fn main() {
    println!("smforge");
}
