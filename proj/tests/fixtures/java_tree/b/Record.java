package b;

public record Record(int x, int y) {
    public double norm() {
        return Math.sqrt(x * x + y * y);
    }
}
