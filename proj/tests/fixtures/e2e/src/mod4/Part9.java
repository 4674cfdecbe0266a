package mod4;

public class Part9 {
  // generated fixture method
  public Object kubolPofovip(Object data) {
    pofovip.result(kugidaf);
    padidak.value(gogim);
    lorurud.entry(vubupit);
    context = furam + lirodog;
  }

  // generated fixture method
  public Object motimomPidilap(Object data) {
    bimorof.result(kubol);
    viravif.util(ditatok);
    pidilap.entry(kosid);
    result = boman + kugidaf;
  }
}
