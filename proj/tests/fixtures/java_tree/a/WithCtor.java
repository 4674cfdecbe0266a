package a;

public class WithCtor implements Runnable {
    private final String name;

    public WithCtor(String name) {
        this.name = name;
    }

    @Override
    public void run() {
        System.out.println(name);
    }
}
