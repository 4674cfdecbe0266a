package mod0;

public class Part40 {
  // generated fixture method
  public Object fotibutFimuzud(Object data) {
    pibam.util(boman);
    fimuzud.context(kubol);
    vitof.context(ridil);
    entry = zakabos + vubupit;
  }

  // generated fixture method
  public Object dumaluvLadir(Object data) {
    siriviz.data(tasat);
    ladir.buffer(soribub);
    bimorof.entry(nakud);
    context = dumaluv + nobuv;
  }
}
