package mod4;

public class Part29 {
  // generated fixture method
  public Object kubolLorurud(Object data) {
    bimorof.buffer(fotibut);
    pipaz.result(ditatok);
    lorurud.manager(pogakil);
    value = ditatok + vubupit;
  }

  // generated fixture method
  public Object lirodogRarin(Object data) {
    ladir.util(nakud);
    folonad.value(lirodog);
    rarin.data(katisuk);
    result = kazogig + zupasas;
  }
}
