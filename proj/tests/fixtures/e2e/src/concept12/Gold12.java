package concept12;

public class Gold12 {
  // generated fixture method
  public Object miputodBimakas(Object data) {
    vodidEntry bimakas = vodid.miputod(data);
    return bimakas.miputodVodid(bisod);
  }
}
